#include "agm3/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace agm3 {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str())
        fail(ErrorCode::UsageError, "config", "bad decimal literal: " + s);
    return v;
}

Json complex_to_json(const Cx& z) {
    return Json{{"re", format_double(z.real())}, {"im", format_double(z.imag())}};
}

Cx complex_from_json(const Json& j) {
    if (j.is_array()) return Cx(parse_double(j.at(0)), parse_double(j.at(1)));
    return Cx(parse_double(j.at("re").get<std::string>()),
              parse_double(j.value("im", std::string("0"))));
}

Json form_to_json(const HomogeneousForm& f) {
    Json terms = Json::array();
    const auto& t = f.table();
    for (int m = 0; m < t.count(); ++m) {
        if (f.coeffs(m) == Cx(0)) continue;
        Json term;
        Json exps = Json::array();
        for (int i = 0; i < f.nvars; ++i) exps.push_back(t.exps[m][i]);
        term["exponents"] = exps;
        term["re"] = format_double(f.coeffs(m).real());
        term["im"] = format_double(f.coeffs(m).imag());
        terms.push_back(term);
    }
    return Json{{"degree", f.degree}, {"variables", f.nvars}, {"terms", terms}};
}

HomogeneousForm form_from_json(const Json& j) {
    int degree = j.at("degree").get<int>();
    int nvars = j.value("variables", 3);
    std::vector<std::pair<std::array<int, 4>, Cx>> terms;
    for (const auto& term : j.at("terms")) {
        std::array<int, 4> e{0, 0, 0, 0};
        const auto& exps = term.at("exponents");
        for (size_t i = 0; i < exps.size() && i < 4; ++i) e[i] = exps[i].get<int>();
        Cx c(parse_double(term.at("re").get<std::string>()),
             parse_double(term.value("im", std::string("0"))));
        terms.push_back({e, c});
    }
    return HomogeneousForm::from_terms(nvars, degree, terms);
}

Json point_to_json(const ProjPoint& p) {
    Json arr = Json::array();
    for (int i = 0; i < p.dim(); ++i)
        arr.push_back(Json::array({format_double(p.v(i).real()), format_double(p.v(i).imag())}));
    return arr;
}

ProjPoint point_from_json(const Json& j) {
    VecC v(static_cast<int>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = complex_from_json(j[i]);
    return ProjPoint(std::move(v));
}

Json cert_to_json(const RankCertificate& c) {
    Json sv = Json::array();
    for (double s : c.singular_values) sv.push_back(format_double(s));
    return Json{{"label", c.label},
                {"claimed_rank", c.claimed_rank},
                {"gap_ratio", format_double(c.gap_ratio)},
                {"singular_values", sv}};
}

Json tower_report_to_json(const RamificationReport& r) {
    Json lines = Json::array();
    for (const auto& l : r.lines) {
        lines.push_back(Json{{"type", tower_type_label(l.type)},
                             {"line", form_to_json(l.line)},
                             {"pencil_mu", Json::array({complex_to_json(l.mu0).dump(),
                                                        complex_to_json(l.mu1).dump()})}});
    }
    return Json{{"counts", Json{{"cc/=", r.count_cc_e},
                                {"cc/c", r.count_cc_c},
                                {"c=/=", r.count_ce_e}}},
                {"distinct", r.distinct},
                {"flex_center", r.flex_center},
                {"lines", lines}};
}

Json flag_to_json(const FlagSpec& f) {
    auto up = [](std::pair<int, int> p) { return Json::array({p.first + 1, p.second + 1}); };
    return Json{{"pair", up(f.distinguished)},
                {"partition", Json::array({up(f.partition[0]), up(f.partition[1])})}};
}

FlagSpec flag_from_json(const Json& j) {
    FlagSpec f;
    auto dn = [](const Json& arr) {
        return std::pair<int, int>{arr.at(0).get<int>() - 1, arr.at(1).get<int>() - 1};
    };
    f.distinguished = dn(j.at("pair"));
    f.partition[0] = dn(j.at("partition").at(0));
    f.partition[1] = dn(j.at("partition").at(1));
    f.validate();
    return f;
}

FlagSpec parse_flag_spec(const std::string& spec) {
    // "pair=1,2;partition=3-4,5-6"
    auto bad = [&]() {
        fail(ErrorCode::UsageError, "flag",
             "expected pair=a,b;partition=c-d,e-f with indices 1..6: " + spec);
    };
    FlagSpec f;
    size_t semi = spec.find(';');
    if (semi == std::string::npos) bad();
    std::string p1 = spec.substr(0, semi), p2 = spec.substr(semi + 1);
    int a, b, c, d, e, g;
    if (std::sscanf(p1.c_str(), "pair=%d,%d", &a, &b) != 2) bad();
    if (std::sscanf(p2.c_str(), "partition=%d-%d,%d-%d", &c, &d, &e, &g) != 4) bad();
    f.distinguished = {a - 1, b - 1};
    f.partition[0] = {c - 1, d - 1};
    f.partition[1] = {e - 1, g - 1};
    f.validate();
    return f;
}

InputConfig config_from_json(const Json& j) {
    InputConfig c;
    if (j.contains("seed")) c.profile.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("precision")) {
        std::string p = j.at("precision").get<std::string>();
        if (p == "double")
            c.profile.precision = Precision::Double;
        else if (p == "extended")
            c.profile.precision = Precision::Extended;
        else
            fail(ErrorCode::UsageError, "config", "precision must be double or extended");
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        if (t.contains("eps_point"))
            c.profile.eps_point = parse_double(t.at("eps_point").get<std::string>());
        if (t.contains("eps_rank"))
            c.profile.eps_rank = parse_double(t.at("eps_rank").get<std::string>());
        if (t.contains("eps_residual"))
            c.profile.eps_residual = parse_double(t.at("eps_residual").get<std::string>());
        if (t.contains("max_newton_iters"))
            c.profile.max_newton_iters = t.at("max_newton_iters").get<int>();
    }
    c.profile.validate();

    if (j.contains("quartic")) c.quartic = Quartic::from_form(form_from_json(j.at("quartic")));
    if (j.contains("alpha")) {
        const auto& a = j.at("alpha");
        if (a.contains("pair")) {
            int i = a.at("pair").at(0).get<int>() - 1;
            int k = a.at("pair").at(1).get<int>() - 1;
            c.alpha_pair = {i, k};
        } else if (a.contains("lines")) {
            c.alpha_lines = {form_from_json(a.at("lines").at(0)),
                             form_from_json(a.at("lines").at(1))};
        } else {
            fail(ErrorCode::UsageError, "config", "alpha needs pair or lines");
        }
    }
    if (j.contains("flag")) c.flag = flag_from_json(j.at("flag"));
    if (j.contains("configuration")) {
        const auto& cfg = j.at("configuration");
        PlaneConfiguration pc;
        pc.E = form_from_json(cfg.at("E"));
        pc.Q = form_from_json(cfg.at("Q"));
        const auto& qs = cfg.at("q");
        if (qs.size() != 6)
            fail(ErrorCode::UsageError, "config", "configuration.q must have 6 points");
        for (int k = 0; k < 6; ++k) pc.q[k] = point_from_json(qs[k]);
        c.direct_config = std::move(pc);
    }
    return c;
}

Json config_to_json(const InputConfig& c) {
    Json j;
    j["seed"] = c.profile.seed;
    j["precision"] = precision_name(c.profile.precision);
    j["tolerances"] = Json{{"eps_point", format_double(c.profile.eps_point)},
                           {"eps_rank", format_double(c.profile.eps_rank)},
                           {"eps_residual", format_double(c.profile.eps_residual)},
                           {"max_newton_iters", c.profile.max_newton_iters}};
    if (c.quartic) j["quartic"] = form_to_json(c.quartic->form);
    if (c.alpha_pair)
        j["alpha"] = Json{{"pair", Json::array({c.alpha_pair->first + 1, c.alpha_pair->second + 1})}};
    if (c.alpha_lines)
        j["alpha"] = Json{{"lines", Json::array({form_to_json((*c.alpha_lines)[0]),
                                                 form_to_json((*c.alpha_lines)[1])})}};
    if (c.flag) j["flag"] = flag_to_json(*c.flag);
    if (c.direct_config) {
        Json q = Json::array();
        for (const auto& p : c.direct_config->q) q.push_back(point_to_json(p));
        j["configuration"] = Json{{"E", form_to_json(c.direct_config->E)},
                                  {"Q", form_to_json(c.direct_config->Q)},
                                  {"q", q}};
    }
    return j;
}

void validate_configuration(const PlaneConfiguration& config, const ToleranceProfile& profile) {
    if (config.E.degree != 3 || config.Q.degree != 2 || config.E.nvars != 3 ||
        config.Q.nvars != 3)
        fail(ErrorCode::UsageError, "configuration", "E must be a cubic and Q a conic in P2");
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b)
            if (ProjPoint::distance(config.q[a], config.q[b]) < 1e3 * profile.eps_point)
                fail(ErrorCode::NonGeneric, "configuration", "marked points collide");
    for (int k = 0; k < 6; ++k) {
        if (on_curve_residual(config.E, config.q[k]) > 1e4 * profile.eps_residual)
            fail(ErrorCode::NonGeneric, "configuration",
                 "marked point " + std::to_string(k + 1) + " is not on E");
        if (on_curve_residual(config.Q, config.q[k]) > 1e4 * profile.eps_residual)
            fail(ErrorCode::NonGeneric, "configuration",
                 "marked point " + std::to_string(k + 1) + " is not on Q");
        if (config.E.gradient_at(as3(config.q[k].v)).norm() < 1e-6 * config.E.max_abs())
            fail(ErrorCode::NonGeneric, "configuration", "E singular at a marked point");
    }
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

InputConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::UsageError, "config", "cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(ErrorCode::UsageError, "config", std::string("JSON parse error: ") + e.what());
    }
    return config_from_json(j);
}

}  // namespace agm3
