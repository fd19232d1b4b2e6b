#include "homsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace homsim {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// 1-based line of the first occurrence of "key" in the config text; 0 when
// the key cannot be located (e.g. a missing key).
std::size_t line_of_key(const std::string& text, const std::string& key) {
    const std::string needle = "\"" + key + "\"";
    const auto pos = text.find(needle);
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + pos, '\n'));
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

struct Ctx {
    const std::string& text;
    const std::string& origin;

    [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
        std::ostringstream os;
        os << origin;
        if (const auto line = line_of_key(text, key)) os << ":" << line;
        os << ": key '" << key << "': " << msg;
        throw ConfigError(os.str());
    }

    void check_keys(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) const {
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [key, value] : obj.items())
            if (!ok.count(key)) fail_key(key, "unknown key in " + where);
    }

    const json& require(const json& obj, const char* key) const {
        const auto it = obj.find(key);
        if (it == obj.end())
            throw ConfigError(origin + ": missing required key '" + std::string(key) + "'");
        return *it;
    }

    double number(const json& obj, const char* key) const {
        const json& v = require(obj, key);
        if (!v.is_number()) fail_key(key, "expected a number");
        return v.get<double>();
    }

    double number_or(const json& obj, const char* key, double fallback) const {
        if (!obj.contains(key)) return fallback;
        return number(obj, key);
    }

    std::uint64_t count(const json& obj, const char* key) const {
        const json& v = require(obj, key);
        if (!v.is_number_unsigned()) fail_key(key, "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::string string(const json& obj, const char* key) const {
        const json& v = require(obj, key);
        if (!v.is_string()) fail_key(key, "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> number_list(const json& v, const char* key) const {
        if (!v.is_array() || v.empty()) fail_key(key, "expected a non-empty array of numbers");
        std::vector<double> out;
        out.reserve(v.size());
        for (const auto& x : v) {
            if (!x.is_number()) fail_key(key, "expected a non-empty array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }
};

json parse_root(Ctx& ctx) {
    try {
        const json root = json::parse(ctx.text);
        if (!root.is_object()) throw ConfigError(ctx.origin + ": config root must be an object");
        return root;
    } catch (const json::parse_error& e) {
        std::ostringstream os;
        os << ctx.origin << ":" << line_of_byte(ctx.text, e.byte) << ": " << e.what();
        throw ConfigError(os.str());
    }
}

// Grid: {"values": [...]} or {"start": a, "stop": b, "count": n, "scale": "linear"|"log"}.
std::vector<double> parse_grid(Ctx& ctx, const json& obj, const char* key) {
    const json& g = ctx.require(obj, key);
    if (!g.is_object()) ctx.fail_key(key, "expected a grid object");
    if (g.contains("values")) {
        ctx.check_keys(g, key, {"values"});
        return ctx.number_list(g["values"], key);
    }
    ctx.check_keys(g, key, {"start", "stop", "count", "scale"});
    const double start = ctx.number(g, "start");
    const double stop = ctx.number(g, "stop");
    const std::uint64_t n = ctx.count(g, "count");
    if (n == 0) ctx.fail_key(key, "grid count must be >= 1");
    std::string scale = "linear";
    if (g.contains("scale")) scale = ctx.string(g, "scale");
    std::vector<double> out(n);
    if (scale == "linear") {
        for (std::uint64_t i = 0; i < n; ++i)
            out[i] = (n == 1) ? start
                              : start + (stop - start) * static_cast<double>(i) /
                                    static_cast<double>(n - 1);
    } else if (scale == "log") {
        if (!(start > 0.0 && stop > 0.0)) ctx.fail_key(key, "log grid requires positive bounds");
        const double ls = std::log(start), le = std::log(stop);
        for (std::uint64_t i = 0; i < n; ++i)
            out[i] = (n == 1) ? start
                              : std::exp(ls + (le - ls) * static_cast<double>(i) /
                                                  static_cast<double>(n - 1));
    } else {
        ctx.fail_key("scale", "must be 'linear' or 'log'");
    }
    return out;
}

PairingPolicy parse_pairing(Ctx& ctx, const json& obj, const char* key) {
    const std::string s = ctx.string(obj, key);
    if (s == "alternating") return PairingPolicy::Alternating;
    if (s == "independent_fair") return PairingPolicy::IndependentFair;
    ctx.fail_key(key, "must be 'alternating' or 'independent_fair'");
}

ChannelModel parse_channel(Ctx& ctx, const json& obj) {
    const json& ch = ctx.require(obj, "channel");
    if (!ch.is_object()) ctx.fail_key("channel", "expected an object");
    const std::string kind = ctx.string(ch, "kind");
    const double pi = std::acos(-1.0);
    if (kind == "ideal_depolarizing") {
        ctx.check_keys(ch, "channel", {"kind", "p"});
        const double p = ctx.number(ch, "p");
        if (!(p >= 0.0 && p <= 1.0)) ctx.fail_key("p", "must be in [0, 1]");
        return IdealDepolarizing{p};
    }
    if (kind == "time_entanglement") {
        ctx.check_keys(ch, "channel", {"kind", "tau", "tau_c", "omega", "axis_theta", "axis_phi"});
        const double tau = ctx.number(ch, "tau");
        const double tau_c = ctx.number(ch, "tau_c");
        const double omega = ctx.number_or(ch, "omega", 0.0);
        if (!(tau_c > 0.0)) ctx.fail_key("tau_c", "must be > 0");
        if (!(tau >= 0.0)) ctx.fail_key("tau", "must be >= 0");
        RotationAxis axis{ctx.number_or(ch, "axis_theta", 0.0), ctx.number_or(ch, "axis_phi", 0.0)};
        return TimeEntanglement{TemporalProfile(tau_c, tau, omega), axis};
    }
    if (kind == "random_rotation") {
        ctx.check_keys(ch, "channel", {"kind", "alpha0", "pairing", "axis_theta", "axis_phi"});
        const double alpha0 = ctx.number(ch, "alpha0");
        if (!(alpha0 >= 0.0 && alpha0 <= pi)) ctx.fail_key("alpha0", "must be in [0, pi]");
        RotationAxis axis{ctx.number_or(ch, "axis_theta", 0.0), ctx.number_or(ch, "axis_phi", 0.0)};
        return RandomRotation{alpha0, axis, parse_pairing(ctx, ch, "pairing")};
    }
    ctx.fail_key("kind", "must be one of 'ideal_depolarizing', 'time_entanglement', "
                         "'random_rotation'");
}

DetectorParams parse_detector(Ctx& ctx, const json& obj) {
    DetectorParams det;
    if (!obj.contains("detector")) return det;
    const json& d = obj["detector"];
    if (!d.is_object()) ctx.fail_key("detector", "expected an object");
    ctx.check_keys(d, "detector", {"eta_os", "eta1", "eta2", "dark_prob"});
    det.eta_os = ctx.number_or(d, "eta_os", 1.0);
    det.eta1 = ctx.number_or(d, "eta1", 1.0);
    det.eta2 = ctx.number_or(d, "eta2", 1.0);
    det.dark_prob = ctx.number_or(d, "dark_prob", 0.0);
    try {
        det.validate();
    } catch (const std::invalid_argument& e) {
        ctx.fail_key("detector", e.what());
    }
    return det;
}

OutputSpec parse_output(Ctx& ctx, const json& obj) {
    OutputSpec out;
    if (!obj.contains("output")) return out;
    const json& o = obj["output"];
    if (!o.is_object()) ctx.fail_key("output", "expected an object");
    ctx.check_keys(o, "output", {"path", "format"});
    if (o.contains("path")) out.path = ctx.string(o, "path");
    if (o.contains("format")) {
        const std::string f = ctx.string(o, "format");
        if (f == "csv")
            out.format = OutputFormat::Csv;
        else if (f == "jsonl")
            out.format = OutputFormat::Jsonl;
        else
            ctx.fail_key("format", "must be 'csv' or 'jsonl'");
    }
    return out;
}

std::optional<std::uint64_t> parse_seed(Ctx& ctx, const json& obj) {
    if (!obj.contains("seed")) return std::nullopt;
    return ctx.count(obj, "seed");
}

std::uint64_t parse_n_pairs(Ctx& ctx, const json& obj) {
    const std::uint64_t n = ctx.count(obj, "n_pairs");
    if (n == 0) ctx.fail_key("n_pairs", "must be >= 1");
    return n;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

DopSweepConfig parse_dop_sweep_config(const std::string& text, const std::string& origin) {
    Ctx ctx{text, origin};
    const json root = parse_root(ctx);
    ctx.check_keys(root, "config", {"tau_grid", "tau_c_values", "output"});
    DopSweepConfig cfg;
    cfg.tau_values = parse_grid(ctx, root, "tau_grid");
    cfg.tau_c_values = ctx.number_list(ctx.require(root, "tau_c_values"), "tau_c_values");
    for (const double tau : cfg.tau_values)
        if (!(tau >= 0.0)) ctx.fail_key("tau_grid", "tau values must be >= 0");
    for (const double tc : cfg.tau_c_values)
        if (!(tc > 0.0)) ctx.fail_key("tau_c_values", "tau_c values must be > 0");
    cfg.output = parse_output(ctx, root);
    return cfg;
}

FockRunConfig parse_fock_run_config(const std::string& text, const std::string& origin) {
    Ctx ctx{text, origin};
    const json root = parse_root(ctx);
    ctx.check_keys(root, "config",
                   {"channel", "n_pairs", "detector", "confidence", "input_delta", "seed",
                    "output"});
    FockRunConfig cfg;
    cfg.channel = parse_channel(ctx, root);
    cfg.n_pairs = parse_n_pairs(ctx, root);
    cfg.detector = parse_detector(ctx, root);
    cfg.confidence = ctx.number_or(root, "confidence", 0.99);
    if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0))
        ctx.fail_key("confidence", "must be in (0, 1)");
    if (cfg.detector.dark_prob != 0.0)
        ctx.fail_key("dark_prob", "fock-run verdicts require dark-free gates (dark_prob = 0)");
    cfg.input_delta = ctx.number_or(root, "input_delta", 0.0);
    cfg.seed = parse_seed(ctx, root);
    cfg.output = parse_output(ctx, root);
    return cfg;
}

VisibilitySweepConfig parse_visibility_sweep_config(const std::string& text,
                                                    const std::string& origin) {
    Ctx ctx{text, origin};
    const json root = parse_root(ctx);
    ctx.check_keys(root, "config",
                   {"channel_kind", "pairing", "mu_grid", "alpha0_grid", "n_pairs", "detector",
                    "input_delta", "seed", "output"});
    VisibilitySweepConfig cfg;
    const std::string kind = ctx.string(root, "channel_kind");
    if (kind == "ideal_depolarizing")
        cfg.channel_kind = ChannelKind::IdealDepolarizing;
    else if (kind == "time_entanglement")
        cfg.channel_kind = ChannelKind::TimeEntanglement;
    else if (kind == "random_rotation")
        cfg.channel_kind = ChannelKind::RandomRotation;
    else
        ctx.fail_key("channel_kind", "must be one of 'ideal_depolarizing', 'time_entanglement', "
                                     "'random_rotation'");
    if (cfg.channel_kind == ChannelKind::RandomRotation) {
        cfg.pairing = parse_pairing(ctx, root, "pairing");
    } else if (root.contains("pairing")) {
        ctx.fail_key("pairing", "only applies to the random_rotation kind");
    }
    cfg.mu_values = parse_grid(ctx, root, "mu_grid");
    for (const double mu : cfg.mu_values)
        if (!(mu > 0.0)) ctx.fail_key("mu_grid", "mu values must be > 0");
    cfg.alpha0_values = parse_grid(ctx, root, "alpha0_grid");
    const double pi = std::acos(-1.0);
    for (const double a : cfg.alpha0_values)
        if (!(a >= 0.0 && a <= pi)) ctx.fail_key("alpha0_grid", "alpha0 values must be in [0, pi]");
    cfg.n_pairs = parse_n_pairs(ctx, root);
    cfg.detector = parse_detector(ctx, root);
    cfg.input_delta = ctx.number_or(root, "input_delta", 0.0);
    cfg.seed = parse_seed(ctx, root);
    cfg.output = parse_output(ctx, root);
    return cfg;
}

DiscriminateConfig parse_discriminate_config(const std::string& text, const std::string& origin) {
    Ctx ctx{text, origin};
    const json root = parse_root(ctx);
    ctx.check_keys(root, "config",
                   {"channel", "mu", "n_pairs", "detector", "k_sigma", "input_delta", "seed",
                    "output"});
    DiscriminateConfig cfg;
    cfg.channel = parse_channel(ctx, root);
    cfg.mu = ctx.number(root, "mu");
    if (!(cfg.mu > 0.0)) ctx.fail_key("mu", "must be > 0");
    cfg.n_pairs = parse_n_pairs(ctx, root);
    cfg.detector = parse_detector(ctx, root);
    cfg.k_sigma = ctx.number_or(root, "k_sigma", 2.0);
    if (!(cfg.k_sigma > 0.0)) ctx.fail_key("k_sigma", "must be > 0");
    cfg.input_delta = ctx.number_or(root, "input_delta", 0.0);
    cfg.seed = parse_seed(ctx, root);
    cfg.output = parse_output(ctx, root);
    return cfg;
}

DopSweepConfig load_dop_sweep_config(const std::string& path) {
    return parse_dop_sweep_config(read_file(path), path);
}
FockRunConfig load_fock_run_config(const std::string& path) {
    return parse_fock_run_config(read_file(path), path);
}
VisibilitySweepConfig load_visibility_sweep_config(const std::string& path) {
    return parse_visibility_sweep_config(read_file(path), path);
}
DiscriminateConfig load_discriminate_config(const std::string& path) {
    return parse_discriminate_config(read_file(path), path);
}

ordered_json channel_to_json(const ChannelModel& channel) {
    ordered_json j;
    if (const auto* d = std::get_if<IdealDepolarizing>(&channel)) {
        j["kind"] = "ideal_depolarizing";
        j["p"] = d->p;
    } else if (const auto* t = std::get_if<TimeEntanglement>(&channel)) {
        j["kind"] = "time_entanglement";
        j["tau"] = t->profile.tau;
        j["tau_c"] = t->profile.tau_c;
        j["omega"] = t->profile.omega;
        j["axis_theta"] = t->axis.theta;
        j["axis_phi"] = t->axis.phi;
    } else if (const auto* r = std::get_if<RandomRotation>(&channel)) {
        j["kind"] = "random_rotation";
        j["alpha0"] = r->alpha0;
        j["pairing"] =
            r->pairing == PairingPolicy::Alternating ? "alternating" : "independent_fair";
        j["axis_theta"] = r->axis.theta;
        j["axis_phi"] = r->axis.phi;
    }
    return j;
}

ordered_json detector_to_json(const DetectorParams& det) {
    return ordered_json{{"eta_os", det.eta_os},
                        {"eta1", det.eta1},
                        {"eta2", det.eta2},
                        {"dark_prob", det.dark_prob}};
}

ordered_json verdict_to_json(const Verdict& verdict) {
    ordered_json j;
    if (const auto* c = std::get_if<ConclusiveRandomRotation>(&verdict)) {
        j["kind"] = "conclusive_random_rotation";
        j["alpha0_estimate"] = c->alpha0_estimate;
        j["ci_low"] = c->ci_low;
        j["ci_high"] = c->ci_high;
    } else if (std::holds_alternative<InconclusiveAtMaximum>(verdict)) {
        j["kind"] = "inconclusive_at_maximum";
    } else if (const auto* p = std::get_if<InconclusiveInsufficientPrecision>(&verdict)) {
        j["kind"] = "inconclusive_insufficient_precision";
        j["required_sigma"] = p->required_sigma;
    } else if (const auto* n = std::get_if<InconclusiveNoEvidence>(&verdict)) {
        j["kind"] = "inconclusive_no_evidence";
        j["alpha0_upper_bound"] = n->alpha0_upper_bound;
        j["confidence"] = n->confidence;
    }
    return j;
}

}  // namespace homsim
