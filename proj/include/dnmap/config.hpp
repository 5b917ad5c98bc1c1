#pragma once

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "problem.hpp"

namespace dnmap {

using json = nlohmann::json;

/// Declarative boundary signal as written in a problem file.
struct SignalSpec {
    enum class Kind { Samples, Expr };
    Kind kind = Kind::Expr;
    double dt = 0.0;  ///< samples
    cvec values;      ///< samples
    std::string name; ///< expr: polynomial | exponential | sine
    json params = json::object();

    bool operator==(const SignalSpec& o) const {
        return kind == o.kind && dt == o.dt && values == o.values && name == o.name && params == o.params;
    }
};

struct BoundarySpec {
    int order = 0;
    SignalSpec signal;
    bool operator==(const BoundarySpec& o) const { return order == o.order && signal == o.signal; }
};

/// zero | exponential(k) | callable(name, params) from a fixed catalog.
struct InitialSpec {
    enum class Kind { Zero, Exponential, Callable };
    Kind kind = Kind::Zero;
    cplx k{0.0, 0.0};
    std::string name;
    json params = json::object();

    bool operator==(const InitialSpec& o) const { return kind == o.kind && k == o.k && name == o.name && params == o.params; }
};

struct TimeSpec {
    double T = 1.0;
    double t_min = 0.1;
    int steps = 256;
    bool operator==(const TimeSpec& o) const { return T == o.T && t_min == o.t_min && steps == o.steps; }
};

struct ProblemConfig {
    cvec dispersion;
    std::vector<BoundarySpec> boundary;
    InitialSpec initial;
    TimeSpec time;

    bool operator==(const ProblemConfig& o) const {
        return dispersion == o.dispersion && boundary == o.boundary && initial == o.initial && time == o.time;
    }
};

namespace detail {

inline cplx parse_complex(const json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError(where + ": expected a number or an [re, im] pair");
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline const json& member(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    return obj.at(key);
}

inline double number(const json& obj, const char* key, const std::string& where) {
    const json& v = member(obj, key, where);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline cvec complex_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected a list");
    cvec out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_complex(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline SignalSpec parse_signal(const json& j, const std::string& where) {
    SignalSpec s;
    const json& kind = member(j, "kind", where);
    if (kind == "samples") {
        s.kind = SignalSpec::Kind::Samples;
        s.dt = number(j, "dt", where);
        s.values = complex_list(member(j, "values", where), where + ".values");
    } else if (kind == "expr") {
        s.kind = SignalSpec::Kind::Expr;
        const json& name = member(j, "name", where);
        if (!name.is_string()) throw ConfigError(where + ".name: expected a string");
        s.name = name.get<std::string>();
        if (s.name != "polynomial" && s.name != "exponential" && s.name != "sine")
            throw ConfigError(where + ".name: unknown expression '" + s.name + "' (polynomial, exponential, sine)");
        if (j.contains("params")) {
            if (!j.at("params").is_object()) throw ConfigError(where + ".params: expected an object");
            s.params = j.at("params");
        }
    } else {
        throw ConfigError(where + ".kind: expected 'samples' or 'expr'");
    }
    return s;
}

inline json signal_json(const SignalSpec& s) {
    if (s.kind == SignalSpec::Kind::Samples) {
        json v = json::array();
        for (const cplx& z : s.values) v.push_back(complex_json(z));
        return {{"kind", "samples"}, {"dt", s.dt}, {"values", v}};
    }
    return {{"kind", "expr"}, {"name", s.name}, {"params", s.params}};
}

} // namespace detail

inline ProblemConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ProblemConfig c;
    c.dispersion = detail::complex_list(detail::member(j, "dispersion", "config"), "dispersion");
    if (c.dispersion.empty()) throw ConfigError("dispersion: empty coefficient list");

    const json& b = detail::member(j, "boundary", "config");
    if (!b.is_array()) throw ConfigError("boundary: expected a list");
    for (std::size_t i = 0; i < b.size(); ++i) {
        const std::string where = "boundary[" + std::to_string(i) + "]";
        const json& o = detail::member(b[i], "order", where);
        if (!o.is_number_integer()) throw ConfigError(where + ".order: expected an integer");
        c.boundary.push_back({o.get<int>(), detail::parse_signal(detail::member(b[i], "signal", where), where + ".signal")});
    }

    if (j.contains("initial")) {
        const json& q = j.at("initial");
        const json& kind = detail::member(q, "kind", "initial");
        if (kind == "zero") {
            c.initial.kind = InitialSpec::Kind::Zero;
        } else if (kind == "exponential") {
            c.initial.kind = InitialSpec::Kind::Exponential;
            c.initial.k = detail::parse_complex(detail::member(q, "k", "initial"), "initial.k");
        } else if (kind == "callable") {
            c.initial.kind = InitialSpec::Kind::Callable;
            const json& name = detail::member(q, "name", "initial");
            if (!name.is_string()) throw ConfigError("initial.name: expected a string");
            c.initial.name = name.get<std::string>();
            if (c.initial.name != "exp_sum" && c.initial.name != "gaussian")
                throw ConfigError("initial.name: unknown callable '" + c.initial.name + "' (exp_sum, gaussian)");
            if (q.contains("params")) {
                if (!q.at("params").is_object()) throw ConfigError("initial.params: expected an object");
                c.initial.params = q.at("params");
            }
        } else {
            throw ConfigError("initial.kind: expected 'zero', 'exponential' or 'callable'");
        }
    }

    const json& t = detail::member(j, "time", "config");
    c.time.T = detail::number(t, "T", "time");
    c.time.t_min = detail::number(t, "t_min", "time");
    const json& steps = detail::member(t, "steps", "time");
    if (!steps.is_number_integer()) throw ConfigError("time.steps: expected an integer");
    c.time.steps = steps.get<int>();
    return c;
}

inline json to_json(const ProblemConfig& c) {
    json j;
    json d = json::array();
    for (const cplx& a : c.dispersion) d.push_back(detail::complex_json(a));
    j["dispersion"] = d;
    json b = json::array();
    for (const auto& e : c.boundary) b.push_back({{"order", e.order}, {"signal", detail::signal_json(e.signal)}});
    j["boundary"] = b;
    switch (c.initial.kind) {
    case InitialSpec::Kind::Zero: j["initial"] = {{"kind", "zero"}}; break;
    case InitialSpec::Kind::Exponential: j["initial"] = {{"kind", "exponential"}, {"k", detail::complex_json(c.initial.k)}}; break;
    case InitialSpec::Kind::Callable: j["initial"] = {{"kind", "callable"}, {"name", c.initial.name}, {"params", c.initial.params}}; break;
    }
    j["time"] = {{"T", c.time.T}, {"t_min", c.time.t_min}, {"steps", c.time.steps}};
    return j;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ProblemConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON syntax error: ") + e.what());
    }
    try {
        return parse_config(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

namespace detail {

inline cplx param_complex(const json& p, const char* key, cplx fallback, const std::string& where) {
    if (!p.contains(key)) return fallback;
    return parse_complex(p.at(key), where + "." + key);
}

inline Signal build_signal(const SignalSpec& s, int order, const DispersionPolynomial& d, double T, const std::string& where) {
    if (s.kind == SignalSpec::Kind::Samples) return Signal::samples(s.values, s.dt);
    const json& p = s.params;
    if (s.name == "polynomial") {
        const cvec c = complex_list(member(p, "coeffs", where + ".params"), where + ".params.coeffs");
        const cvec dc = poly::derivative(c);
        return Signal::closed_form([c](double t) { return poly::eval(c, cplx(t)); },
                                   Signal::Fn([dc](double t) { return poly::eval(dc, cplx(t)); }), T);
    }
    if (s.name == "exponential") {
        // amplitude * e^{-omega(k) t}; the amplitude defaults to (ik)^order
        const cplx k = parse_complex(member(p, "k", where + ".params"), where + ".params.k");
        const cplx a = param_complex(p, "amplitude", std::pow(I * k, order), where + ".params");
        const cplx w = d(k);
        return Signal::closed_form([=](double t) { return a * std::exp(-w * t); },
                                   Signal::Fn([=](double t) { return -w * a * std::exp(-w * t); }), T);
    }
    // sine: amplitude * sin(frequency t + phase)
    const cplx a = param_complex(p, "amplitude", 1.0, where + ".params");
    const double f = p.contains("frequency") ? number(p, "frequency", where + ".params") : 1.0;
    const double ph = p.contains("phase") ? number(p, "phase", where + ".params") : 0.0;
    return Signal::closed_form([=](double t) { return a * std::sin(f * t + ph); },
                               Signal::Fn([=](double t) { return a * f * std::cos(f * t + ph); }), T);
}

inline InitialData build_initial(const InitialSpec& q) {
    switch (q.kind) {
    case InitialSpec::Kind::Zero: return InitialData::zero();
    case InitialSpec::Kind::Exponential: return InitialData::exponential(q.k);
    case InitialSpec::Kind::Callable: break;
    }
    const json& p = q.params;
    if (q.name == "exp_sum") {
        // sum_j c_j e^{i k_j x}, with its closed-form transform
        const json& terms = member(p, "terms", "initial.params");
        if (!terms.is_array() || terms.empty()) throw ConfigError("initial.params.terms: expected a non-empty list");
        cvec c, k;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string w = "initial.params.terms[" + std::to_string(i) + "]";
            c.push_back(parse_complex(member(terms[i], "c", w), w + ".c"));
            k.push_back(parse_complex(member(terms[i], "k", w), w + ".k"));
        }
        for (const cplx& kk : k)
            if (!(kk.imag() > 0.0)) throw ValidationError("initial: exp_sum wavenumbers need Im k > 0");
        return InitialData::callable(
            [c, k](double x) {
                cplx s = 0.0;
                for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * std::exp(I * k[i] * x);
                return s;
            },
            InitialData::Transform([c, k](cplx xi) {
                cplx s = 0.0;
                for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * (-I) / (xi - k[i]);
                return s;
            }));
    }
    // gaussian: amplitude * e^{-(x/width)^2}; no analytic transform supplied
    const cplx a = param_complex(p, "amplitude", 1.0, "initial.params");
    const double w = p.contains("width") ? number(p, "width", "initial.params") : 1.0;
    if (!(w > 0.0)) throw ValidationError("initial: gaussian width must be positive");
    return InitialData::callable([a, w](double x) { return a * std::exp(-(x / w) * (x / w)); });
}

} // namespace detail

/// Boundary signals are sorted by order, as the maps expect.
inline BoundaryValueProblem build_problem(const ProblemConfig& c) {
    BoundaryValueProblem p;
    p.dispersion = DispersionPolynomial(c.dispersion);
    p.horizon = c.time.T;
    std::vector<std::size_t> idx(c.boundary.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return c.boundary[a].order < c.boundary[b].order; });
    for (std::size_t i : idx) {
        const auto& e = c.boundary[i];
        p.given_orders.push_back(e.order);
        p.boundary_signals.push_back(
            detail::build_signal(e.signal, e.order, p.dispersion, c.time.T, "boundary[" + std::to_string(i) + "].signal"));
    }
    p.initial = detail::build_initial(c.initial);
    return p;
}

inline TimeGrid build_grid(const ProblemConfig& c) { return TimeGrid::make(c.time.T, c.time.t_min, c.time.steps); }

} // namespace dnmap
