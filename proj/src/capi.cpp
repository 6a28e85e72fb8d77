#include "sqglab.h"

#include <cstring>
#include <new>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "sqg/coefficients.hpp"
#include "sqg/experiments.hpp"
#include "sqg/measure.hpp"
#include "sqg/nonlinearity.hpp"

namespace {

thread_local std::string g_last_error = "";

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
sqg_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return SQG_ERR_INVALID_ARGUMENT;
    } catch (const nlohmann::json::exception& e) {
        g_last_error = e.what();
        return SQG_ERR_PARSE;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return SQG_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SQG_ERR_INTERNAL;
    }
}

sqg_status need(bool cond, const char* msg) {
    if (cond) return SQG_OK;
    g_last_error = msg;
    return SQG_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct sqg_field {
    sqg::SpectralField field;
};
struct sqg_sampler {
    sqg::MeasureSampler sampler;
};
struct sqg_report {
    sqg::ExperimentReport report;
};

extern "C" {

const char* sqg_version(void) { return "0.1.0"; }

const char* sqg_last_error(void) { return g_last_error.c_str(); }

void sqg_string_free(char* s) { delete[] s; }

sqg_status sqg_field_from_json(const char* json, sqg_field** out) {
    if (auto st = need(json && out, "null argument")) return st;
    return guarded([&] {
        *out = new sqg_field{sqg::SpectralField::from_json(json)};
        return SQG_OK;
    });
}

sqg_status sqg_field_to_json(const sqg_field* f, char** out_json) {
    if (auto st = need(f && out_json, "null argument")) return st;
    return guarded([&] {
        *out_json = dup_string(f->field.to_json());
        return SQG_OK;
    });
}

sqg_status sqg_field_truncation(const sqg_field* f, int* out) {
    if (auto st = need(f && out, "null argument")) return st;
    *out = f->field.truncation();
    return SQG_OK;
}

sqg_status sqg_field_fl_norm(const sqg_field* f, double p, double s, double* out) {
    if (auto st = need(f && out, "null argument")) return st;
    return guarded([&] {
        *out = f->field.fl_norm(p, s);
        return SQG_OK;
    });
}

sqg_status sqg_field_coeff(const sqg_field* f, int kx, int ky, double* re, double* im) {
    if (auto st = need(f && re && im, "null argument")) return st;
    const sqg::cplx v = f->field.at({kx, ky});
    *re = v.real();
    *im = v.imag();
    return SQG_OK;
}

void sqg_field_free(sqg_field* f) { delete f; }

sqg_status sqg_sampler_new(int truncation, uint64_t seed, sqg_sampler** out) {
    if (auto st = need(out != nullptr, "null argument")) return st;
    return guarded([&] {
        *out = new sqg_sampler{sqg::MeasureSampler(truncation, seed)};
        return SQG_OK;
    });
}

sqg_status sqg_sampler_draw(sqg_sampler* s, sqg_field** out) {
    if (auto st = need(s && out, "null argument")) return st;
    return guarded([&] {
        *out = new sqg_field{s->sampler.sample()};
        return SQG_OK;
    });
}

sqg_status sqg_sampler_draw_at(const sqg_sampler* s, uint64_t index, sqg_field** out) {
    if (auto st = need(s && out, "null argument")) return st;
    return guarded([&] {
        *out = new sqg_field{s->sampler.sample_at(index)};
        return SQG_OK;
    });
}

void sqg_sampler_free(sqg_sampler* s) { delete s; }

sqg_status sqg_alpha(int h1x, int h1y, int h2x, int h2y, int kx, int ky, double* out) {
    if (auto st = need(out != nullptr, "null argument")) return st;
    return guarded([&] {
        *out = sqg::alpha({h1x, h1y}, {h2x, h2y}, {kx, ky});
        return SQG_OK;
    });
}

sqg_status sqg_beta(int kx, int ky, int jx, int jy, double delta, double* out) {
    if (auto st = need(out != nullptr, "null argument")) return st;
    return guarded([&] {
        *out = sqg::beta({kx, ky}, {jx, jy}, delta);
        return SQG_OK;
    });
}

sqg_status sqg_gamma(int kx, int ky, int jx, int jy, double delta, double* out) {
    if (auto st = need(out != nullptr, "null argument")) return st;
    return guarded([&] {
        *out = sqg::gamma_coeff({kx, ky}, {jx, jy}, delta);
        return SQG_OK;
    });
}

sqg_status sqg_gamma_row_sum(int kx, int ky, double delta, int cutoff, double* out) {
    if (auto st = need(out != nullptr, "null argument")) return st;
    return guarded([&] {
        *out = sqg::gamma_row_sum({kx, ky}, delta, cutoff);
        return SQG_OK;
    });
}

sqg_status sqg_eval_B(const sqg_field* psi, int truncation, sqg_field** out) {
    if (auto st = need(psi && out, "null argument")) return st;
    return guarded([&] {
        *out = new sqg_field{sqg::eval_B(psi->field, truncation).field};
        return SQG_OK;
    });
}

sqg_status sqg_h1_pairing(const sqg_field* psi, int truncation, double* value, double* scale) {
    if (auto st = need(psi && value && scale, "null argument")) return st;
    return guarded([&] {
        const auto r = sqg::h1_pairing(psi->field, truncation);
        *value = r.value;
        *scale = r.scale;
        return SQG_OK;
    });
}

sqg_status sqg_default_config(const char* experiment, char** out_json) {
    if (auto st = need(experiment && out_json, "null argument")) return st;
    return guarded([&] {
        *out_json = dup_string(sqg::defaults_for(experiment).to_json());
        return SQG_OK;
    });
}

sqg_status sqg_experiment_list(char** out_names) {
    if (auto st = need(out_names != nullptr, "null argument")) return st;
    return guarded([&] {
        std::ostringstream os;
        bool first = true;
        for (const auto& n : sqg::experiment_names()) {
            if (!first) os << ",";
            os << n;
            first = false;
        }
        *out_names = dup_string(os.str());
        return SQG_OK;
    });
}

sqg_status sqg_experiment_run(const char* experiment, const char* config_json,
                              const char* out_dir, sqg_report** out) {
    if (auto st = need(experiment && out, "null argument")) return st;
    return guarded([&] {
        sqg::ExperimentConfig cfg = sqg::defaults_for(experiment);
        if (config_json && *config_json) {
            // overrides on top of defaults: merge keys into the default json
            auto base = nlohmann::json::parse(cfg.to_json());
            auto over = nlohmann::json::parse(config_json);
            for (const auto& [key, val] : over.items()) base[key] = val;
            cfg = sqg::ExperimentConfig::from_json(base.dump());
        }
        *out = new sqg_report{
            sqg::run_experiment(experiment, cfg, out_dir ? std::string(out_dir) : "")};
        return SQG_OK;
    });
}

sqg_status sqg_report_passed(const sqg_report* r, int* out) {
    if (auto st = need(r && out, "null argument")) return st;
    *out = r->report.passed() ? 1 : 0;
    return SQG_OK;
}

sqg_status sqg_report_json(const sqg_report* r, char** out_json) {
    if (auto st = need(r && out_json, "null argument")) return st;
    return guarded([&] {
        *out_json = dup_string(r->report.to_json());
        return SQG_OK;
    });
}

sqg_status sqg_report_summary(const sqg_report* r, char** out_text) {
    if (auto st = need(r && out_text, "null argument")) return st;
    return guarded([&] {
        *out_text = dup_string(r->report.summary());
        return SQG_OK;
    });
}

void sqg_report_free(sqg_report* r) { delete r; }

}  // extern "C"
