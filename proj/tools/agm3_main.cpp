// agm3: plane-quartic AGM step pipeline with numerical certificates.
//
// Subcommands: bitangents, classes, flags, extract, step, roundtrip,
// iterate, verify. Every run emits a machine-readable JSON report; exit
// codes: 0 pass, 1 usage error, 2 non-generic input, 3 numeric failure.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>

#include "agm3/io.hpp"

using namespace agm3;

namespace {

struct Ctx {
    InputConfig input;
    ToleranceProfile prof;
    Json stages = Json::array();
    Json errors = Json::array();
    bool pass = true;
    bool timings = false;
    std::uint64_t input_hash = 0;

    // cached pipeline products
    std::optional<std::vector<BitangentRecord>> bt;
    std::optional<TwoTorsionClass> cls;
    std::optional<PlaneConfiguration> config;

    double now_ms() {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    }

    Json& push_stage(const std::string& name) {
        stages.push_back(Json{{"name", name}, {"status", "ok"}});
        return stages.back();
    }
};

const std::vector<BitangentRecord>& require_bitangents(Ctx& ctx) {
    if (ctx.bt) return *ctx.bt;
    if (!ctx.input.quartic)
        fail(ErrorCode::UsageError, "cli", "this subcommand needs a quartic in the config");
    double t0 = ctx.now_ms();
    ctx.bt = bitangents(*ctx.input.quartic, ctx.prof);
    double t1 = ctx.now_ms();

    Json& st = ctx.push_stage("bitangents");
    st["counts"] = Json{{"bitangents", ctx.bt->size()}};
    double worst = 0;
    Json lines = Json::array();
    for (const auto& b : *ctx.bt) {
        worst = std::max(worst, b.residual);
        lines.push_back(Json{{"line", form_to_json(b.line)},
                             {"contacts", Json::array({point_to_json(b.contacts[0]),
                                                       point_to_json(b.contacts[1])})},
                             {"residual", format_double(b.residual)}});
    }
    st["residuals"] = Json{{"max_perfect_square", format_double(worst)}};
    st["lines"] = lines;
    if (ctx.timings) st["timings_ms"] = format_double(t1 - t0);
    return *ctx.bt;
}

const TwoTorsionClass& require_class(Ctx& ctx) {
    if (ctx.cls) return *ctx.cls;
    const auto& bt = require_bitangents(ctx);
    std::pair<int, int> pair;
    if (ctx.input.alpha_pair) {
        pair = *ctx.input.alpha_pair;
        if (pair.first < 0 || pair.second < 0 || pair.first >= static_cast<int>(bt.size()) ||
            pair.second >= static_cast<int>(bt.size()) || pair.first == pair.second)
            fail(ErrorCode::UsageError, "cli", "alpha pair indices out of range");
    } else if (ctx.input.alpha_lines) {
        pair = match_bitangent_pair(bt, (*ctx.input.alpha_lines)[0], (*ctx.input.alpha_lines)[1],
                                    ctx.prof);
    } else {
        fail(ErrorCode::UsageError, "cli", "config must specify alpha (pair or lines)");
    }
    ctx.cls = alpha_class(bt, pair, ctx.prof);
    Json& st = ctx.push_stage("alpha_class");
    Json pairs = Json::array();
    for (auto [i, j] : ctx.cls->pairs) pairs.push_back(Json::array({i + 1, j + 1}));
    st["pairs"] = pairs;
    st["representative"] =
        Json::array({ctx.cls->representative.first + 1, ctx.cls->representative.second + 1});
    return *ctx.cls;
}

const PlaneConfiguration& require_configuration(Ctx& ctx) {
    if (ctx.config) return *ctx.config;
    if (ctx.input.direct_config) {
        validate_configuration(*ctx.input.direct_config, ctx.prof);
        ctx.config = *ctx.input.direct_config;
        Json& st = ctx.push_stage("configuration");
        st["source"] = "direct";
        return *ctx.config;
    }
    const auto& bt = require_bitangents(ctx);
    const auto& cls = require_class(ctx);
    double t0 = ctx.now_ms();
    ctx.config = extract_configuration(*ctx.input.quartic, bt, cls, ctx.prof);
    double t1 = ctx.now_ms();
    Json& st = ctx.push_stage("configuration");
    st["source"] = "extracted";
    st["E"] = form_to_json(ctx.config->E);
    st["Q"] = form_to_json(ctx.config->Q);
    Json q = Json::array();
    for (const auto& p : ctx.config->q) q.push_back(point_to_json(p));
    st["q"] = q;
    Json certs = Json::array();
    for (const auto& c : ctx.config->certificates) certs.push_back(cert_to_json(c));
    st["certificates"] = certs;
    st["residuals"] = Json{{"held_out_cross_points", format_double(ctx.config->held_out_residual)},
                           {"q_incidence", format_double(ctx.config->q_incidence_residual)}};
    if (ctx.timings) st["timings_ms"] = format_double(t1 - t0);
    return *ctx.config;
}

FlagSpec require_flag(Ctx& ctx, const std::string& cli_flag) {
    if (!cli_flag.empty()) return parse_flag_spec(cli_flag);
    if (ctx.input.flag) return *ctx.input.flag;
    fail(ErrorCode::UsageError, "cli", "a flag is required (--flag or config.flag)");
}

Json step_to_json(const StepOutput& s) {
    Json j;
    j["t"] = point_to_json(s.t);
    Json ram = Json::array();
    for (const auto& r : s.ram) ram.push_back(point_to_json(r));
    j["ram"] = ram;
    j["E_prime"] = form_to_json(s.E_prime);
    j["Q_prime"] = form_to_json(s.Q_prime);
    Json qp = Json::array();
    for (const auto& p : s.q_prime) qp.push_back(point_to_json(p));
    j["q_prime"] = qp;
    Json certs = Json::array();
    for (const auto& c : s.certificates) certs.push_back(cert_to_json(c));
    j["certificates"] = certs;
    double worst = 0;
    for (const auto& p : s.q_prime) {
        worst = std::max(worst, on_curve_residual(s.E_prime, p));
        worst = std::max(worst, on_curve_residual(s.Q_prime, p));
    }
    j["residuals"] = Json{{"qprime_on_curves", format_double(worst)}};
    j["tower_in"] = tower_report_to_json(s.report_in);
    j["tower_out"] = tower_report_to_json(s.report_out);
    j["dual_flag"] = flag_to_json(s.dual_flag);
    Json cands = Json::array();
    for (const auto& part : s.partition_candidates) {
        FlagSpec f;
        f.distinguished = s.dual_flag.distinguished;
        f.partition = part;
        cands.push_back(flag_to_json(f)["partition"]);
    }
    j["partition_candidates"] = cands;
    j["flex_center"] = s.flex_center;
    return j;
}

void stage_space_model(Ctx& ctx) {
    const auto& config = require_configuration(ctx);
    SpaceCurveModel model = build_space_model(config, ctx.prof);
    OddSpaceReport rep = odd_space_report(model, config, ctx.prof);
    Json& st = ctx.push_stage("space_model");
    st["Q2"] = form_to_json(model.Q2);
    st["Q3"] = form_to_json(model.Q3);
    st["odd_dim"] = rep.odd_dim;
    st["even_dim"] = rep.even_dim;
    st["vertex"] = point_to_json(rep.vertex);
    st["vertex_off_Q2"] = rep.vertex_off_Q2;
    st["residuals"] = Json{{"lifted_points", format_double(rep.lifted_point_residual)}};
    if (rep.lifted_point_residual > 1e-10) ctx.pass = false;
}

void stage_canonical_iso(Ctx& ctx, const StepOutput& step) {
    AffineChart chart = AffineChart::standard();
    CanonicalIso iso = canonical_iso(step, chart, chart);
    Json& st = ctx.push_stage("canonical_iso");
    st["off_identity"] = format_double(iso.off_identity());
    double t_dist = ProjPoint::distance(iso.apply(step.t), step.t);
    st["t_fixed_distance"] = format_double(t_dist);
    // ten sampled pencil lines through t must map to themselves
    Rng rng(ctx.prof.seed ^ 0x9e151ca1UL);
    Eigen::Vector3cd tv = as3(step.t.v);
    Eigen::Vector3cd cand[3] = {cross3(tv, Eigen::Vector3cd(1, 0, 0)),
                                cross3(tv, Eigen::Vector3cd(0, 1, 0)),
                                cross3(tv, Eigen::Vector3cd(0, 0, 1))};
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (cand[k].norm() > cand[best].norm()) best = k;
    Eigen::Vector3cd u0 = cand[best].normalized();
    Eigen::Vector3cd u1 = cand[(best + 1) % 3] - u0 * (u0.adjoint() * cand[(best + 1) % 3])(0);
    u1.normalize();
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
        Eigen::Vector3cd n = rng.next_complex() * u0 + rng.next_complex() * u1;
        HomogeneousForm line = HomogeneousForm::line(n).normalized();
        worst = std::max(worst, form_distance(iso.apply_line(line), line));
    }
    st["pencil_lines_fixed_max_distance"] = format_double(worst);
    if (iso.off_identity() > 1e-12 || t_dist > 1e-10 || worst > 1e-10) ctx.pass = false;
}

int run_report(Ctx& ctx, const std::string& subcommand, const std::string& out_path,
               const std::function<void()>& body) {
    int exit_code = 0;
    try {
        body();
    } catch (const Error& e) {
        ctx.errors.push_back(Json{{"stage", e.stage()},
                                  {"code", error_code_name(e.code())},
                                  {"message", e.what()}});
        ctx.pass = false;
        exit_code = e.exit_code();
    } catch (const std::exception& e) {
        ctx.errors.push_back(Json{{"stage", "internal"}, {"code", "Unknown"}, {"message", e.what()}});
        ctx.pass = false;
        exit_code = 3;
    }
    Json report;
    report["tool"] = "agm3";
    report["subcommand"] = subcommand;
    char hash_buf[20];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(ctx.input_hash));
    report["input"] = Json{{"hash", hash_buf},
                           {"seed", ctx.prof.seed},
                           {"precision", precision_name(ctx.prof.precision)}};
    report["stages"] = ctx.stages;
    report["errors"] = ctx.errors;
    report["verdict"] = ctx.pass ? "pass" : "fail";
    std::string text = report.dump(2);
    if (out_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(out_path);
        out << text << "\n";
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"genus-3 AGM step on plane quartics, with rank certificates"};
    app.require_subcommand(1);

    std::string config_path, flag_spec, out_path, dual_pair_spec, precision_str;
    std::uint64_t seed = 0;
    bool seed_set = false, timings = false;
    double eps_rank = 0, eps_point = 0, eps_residual = 0;
    int n_steps = 3;

    app.add_option("--config", config_path, "input JSON document");
    app.add_option("--flag", flag_spec, "flag spec: pair=1,2;partition=3-4,5-6");
    app.add_option("--out", out_path, "write the report here instead of stdout");
    app.add_option("--seed", seed, "override the sampling seed")->each([&](std::string) {
        seed_set = true;
    });
    app.add_option("--eps-rank", eps_rank, "override eps_rank");
    app.add_option("--eps-point", eps_point, "override eps_point");
    app.add_option("--eps-residual", eps_residual, "override eps_residual");
    app.add_option("--precision", precision_str, "double | extended");
    app.add_option("--n", n_steps, "number of chained steps for iterate");
    app.add_option("--dual-pair", dual_pair_spec,
                   "override the dual distinguished pair for roundtrip, e.g. 3,4");
    app.add_flag("--timings", timings, "include wall-clock timings in the report");

    auto* cmd_bitangents = app.add_subcommand("bitangents", "compute the 28 bitangents");
    auto* cmd_classes = app.add_subcommand("classes", "classify all 378 bitangent pairs");
    auto* cmd_flags = app.add_subcommand("flags", "enumerate pairs, matchings and flags");
    auto* cmd_extract = app.add_subcommand("extract", "extract the plane configuration");
    auto* cmd_step = app.add_subcommand("step", "run one AGM step");
    auto* cmd_roundtrip = app.add_subcommand("roundtrip", "step forward and back, compare");
    auto* cmd_iterate = app.add_subcommand("iterate", "chain steps through dual flags");
    auto* cmd_verify = app.add_subcommand("verify", "run the full certified pipeline");
    for (auto* sub : {cmd_bitangents, cmd_classes, cmd_flags, cmd_extract, cmd_step,
                      cmd_roundtrip, cmd_iterate, cmd_verify})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // usage errors exit with 1
    }

    Ctx ctx;
    ctx.timings = timings;
    try {
        if (!config_path.empty()) {
            ctx.input = load_config_file(config_path);
            std::ifstream raw(config_path);
            std::string bytes((std::istreambuf_iterator<char>(raw)),
                              std::istreambuf_iterator<char>());
            ctx.input_hash = fnv1a_hash(bytes);
        }
        ctx.prof = ctx.input.profile;
        if (seed_set) ctx.prof.seed = seed;
        if (eps_rank > 0) ctx.prof.eps_rank = eps_rank;
        if (eps_point > 0) ctx.prof.eps_point = eps_point;
        if (eps_residual > 0) ctx.prof.eps_residual = eps_residual;
        if (!precision_str.empty())
            ctx.prof.precision =
                precision_str == "extended" ? Precision::Extended : Precision::Double;
        ctx.prof.validate();
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.exit_code();
    }

    auto needs_config = [&](const char* who) {
        if (config_path.empty())
            fail(ErrorCode::UsageError, "cli", std::string(who) + " requires --config");
    };

    if (*cmd_bitangents) {
        return run_report(ctx, "bitangents", out_path, [&] {
            needs_config("bitangents");
            require_bitangents(ctx);
        });
    }

    if (*cmd_classes) {
        return run_report(ctx, "classes", out_path, [&] {
            needs_config("classes");
            const auto& bt = require_bitangents(ctx);
            double t0 = ctx.now_ms();
            ClassTable table = build_class_table(bt, ctx.prof);
            Json& st = ctx.push_stage("classes");
            st["counts"] =
                Json{{"pairs", 378}, {"classes", table.classes.size()}, {"class_size", 6}};
            Json classes = Json::array();
            bool sizes_ok = true;
            for (const auto& cls : table.classes) {
                Json pairs = Json::array();
                for (auto [i, j] : cls.pairs) pairs.push_back(Json::array({i + 1, j + 1}));
                classes.push_back(pairs);
                if (cls.pairs.size() != 6) sizes_ok = false;
            }
            st["classes"] = classes;
            // exhaustive within-class pairwise syzygy
            bool within = true;
            for (const auto& cls : table.classes)
                for (size_t a = 0; a < cls.pairs.size() && within; ++a)
                    for (size_t b = a + 1; b < cls.pairs.size() && within; ++b) {
                        auto res = is_syzygetic(bt[cls.pairs[a].first], bt[cls.pairs[a].second],
                                                bt[cls.pairs[b].first], bt[cls.pairs[b].second],
                                                ctx.prof);
                        if (!res.syzygetic) within = false;
                    }
            st["within_class_pairwise_syzygetic"] = within;

            // Weil pairing table and its structure
            const int n = static_cast<int>(table.classes.size());
            std::vector<std::vector<int>> e(n, std::vector<int>(n, 0));
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b) {
                    int v = weil_pairing(bt, table.classes[a], table.classes[b], ctx.prof);
                    e[a][b] = e[b][a] = v;
                }
            bool alternating = true, nondegenerate = true;
            int zero_min = 99, zero_max = -1;
            for (int a = 0; a < n; ++a) {
                if (e[a][a] != 0) alternating = false;
                int zeros = 0, ones = 0;
                for (int b = 0; b < n; ++b) (e[a][b] == 0 ? zeros : ones)++;
                zero_min = std::min(zero_min, zeros);
                zero_max = std::max(zero_max, zeros);
                if (ones == 0) nondegenerate = false;
            }
            st["pairing"] = Json{{"symmetric", true},
                                 {"alternating", alternating},
                                 {"nondegenerate", nondegenerate},
                                 {"zeros_per_class_min", zero_min},
                                 {"zeros_per_class_max", zero_max}};
            Json rows = Json::array();
            for (int a = 0; a < n; ++a) {
                std::string row;
                row.reserve(n);
                for (int b = 0; b < n; ++b) row.push_back(e[a][b] ? '1' : '0');
                rows.push_back(row);
            }
            st["pairing_rows"] = rows;
            double t1 = ctx.now_ms();
            if (ctx.timings) st["timings_ms"] = format_double(t1 - t0);
            if (!sizes_ok || table.classes.size() != 63 || !within || !alternating ||
                !nondegenerate || zero_min != 31 || zero_max != 31)
                ctx.pass = false;
        });
    }

    if (*cmd_flags) {
        return run_report(ctx, "flags", out_path, [&] {
            FlagEnumeration e = enumerate_flags();
            Json& st = ctx.push_stage("flags");
            st["counts"] = Json{{"pairs", e.pairs.size()},
                                {"matchings", e.matchings.size()},
                                {"flags", e.flags.size()}};
            Json flags = Json::array();
            for (const auto& f : e.flags) flags.push_back(flag_to_json(f));
            st["flags"] = flags;
            if (e.pairs.size() != 15 || e.matchings.size() != 15 || e.flags.size() != 45)
                ctx.pass = false;
        });
    }

    if (*cmd_extract) {
        return run_report(ctx, "extract", out_path, [&] {
            needs_config("extract");
            require_configuration(ctx);
            stage_space_model(ctx);
            for (const auto& c : ctx.config->certificates)
                if (c.gap_ratio >= ctx.prof.eps_rank) ctx.pass = false;
            if (ctx.config->held_out_residual > 1e-7) ctx.pass = false;
        });
    }

    auto run_step_stage = [&](const FlagSpec& flag) -> StepOutput {
        const auto& config = require_configuration(ctx);
        double t0 = ctx.now_ms();
        StepOutput step = agm_step(config, flag, ctx.prof);
        double t1 = ctx.now_ms();
        Json& st = ctx.push_stage("step");
        st["flag"] = flag_to_json(flag);
        Json body = step_to_json(step);
        for (auto it = body.begin(); it != body.end(); ++it) st[it.key()] = it.value();
        if (ctx.timings) st["timings_ms"] = format_double(t1 - t0);
        for (const auto& c : step.certificates)
            if (c.gap_ratio >= ctx.prof.eps_rank) ctx.pass = false;
        return step;
    };

    if (*cmd_step) {
        return run_report(ctx, "step", out_path, [&] {
            needs_config("step");
            FlagSpec flag = require_flag(ctx, flag_spec);
            StepOutput step = run_step_stage(flag);
            stage_canonical_iso(ctx, step);
        });
    }

    if (*cmd_roundtrip) {
        return run_report(ctx, "roundtrip", out_path, [&] {
            needs_config("roundtrip");
            FlagSpec flag = require_flag(ctx, flag_spec);
            const auto& config = require_configuration(ctx);
            RoundTrip rt;
            if (dual_pair_spec.empty()) {
                rt = roundtrip_check(config, flag, ctx.prof);
            } else {
                int a = 0, b = 0;
                if (std::sscanf(dual_pair_spec.c_str(), "%d,%d", &a, &b) != 2)
                    fail(ErrorCode::UsageError, "cli", "--dual-pair expects a,b (1-based)");
                rt = roundtrip_with_pair(config, flag, {a - 1, b - 1}, ctx.prof);
            }
            Json& st = ctx.push_stage("roundtrip");
            st["forward"] = step_to_json(rt.forward);
            st["back"] = step_to_json(rt.back);
            st["residuals"] = Json{{"E_distance", format_double(rt.e_distance)},
                                   {"Q_distance", format_double(rt.q_distance)},
                                   {"point_distance", format_double(rt.point_distance)},
                                   {"t_distance", format_double(rt.t_distance)}};
            Json cands = Json::array();
            for (double c : rt.candidate_residuals) cands.push_back(format_double(c));
            st["candidate_residuals"] = cands;
            st["best_candidate"] = rt.best_candidate + 1;
            if (dual_pair_spec.empty() &&
                (rt.e_distance > 1e-6 || rt.q_distance > 1e-6 || rt.point_distance > 1e-7))
                ctx.pass = false;
        });
    }

    if (*cmd_iterate) {
        return run_report(ctx, "iterate", out_path, [&] {
            needs_config("iterate");
            if (n_steps < 1) fail(ErrorCode::UsageError, "cli", "--n must be at least 1");
            FlagSpec flag = require_flag(ctx, flag_spec);
            PlaneConfiguration current = require_configuration(ctx);
            for (int k = 0; k < n_steps; ++k) {
                StepOutput step = agm_step(current, flag, ctx.prof);
                Json& st = ctx.push_stage("step_" + std::to_string(k + 1));
                st["flag"] = flag_to_json(flag);
                Json body = step_to_json(step);
                for (auto it = body.begin(); it != body.end(); ++it) st[it.key()] = it.value();
                for (const auto& c : step.certificates)
                    if (c.gap_ratio >= ctx.prof.eps_rank) ctx.pass = false;
                current = step.as_configuration();
                flag = step.dual_flag;
            }
        });
    }

    if (*cmd_verify) {
        return run_report(ctx, "verify", out_path, [&] {
            needs_config("verify");
            require_configuration(ctx);
            stage_space_model(ctx);
            FlagSpec flag = require_flag(ctx, flag_spec);
            StepOutput step = run_step_stage(flag);
            stage_canonical_iso(ctx, step);
            const auto& config = *ctx.config;
            RoundTrip rt = roundtrip_check(config, flag, ctx.prof);
            Json& st = ctx.push_stage("roundtrip");
            st["residuals"] = Json{{"E_distance", format_double(rt.e_distance)},
                                   {"Q_distance", format_double(rt.q_distance)},
                                   {"point_distance", format_double(rt.point_distance)},
                                   {"t_distance", format_double(rt.t_distance)}};
            if (rt.e_distance > 1e-6 || rt.q_distance > 1e-6 || rt.point_distance > 1e-7)
                ctx.pass = false;
            for (const auto& c : ctx.config->certificates)
                if (c.gap_ratio >= ctx.prof.eps_rank) ctx.pass = false;
        });
    }

    return 1;
}
