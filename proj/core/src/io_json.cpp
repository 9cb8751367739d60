#include "freeconv/io_json.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "freeconv/version.hpp"
#include "json.hpp"

namespace freeconv {

namespace {

using json = nlohmann::json;                 // sorted keys: canonical form
using ojson = nlohmann::ordered_json;        // report layout

json parse_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("invalid JSON");
    return j;
}

// json type mismatches surface as library exceptions; report them as parse
// failures
template <class F>
auto guarded(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    }
}

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ParseError(std::string("missing numeric field '") + key + "'");
    return j.at(key).get<double>();
}

Measure measure_from(const json& j) {
    if (!j.contains("pieces") || !j.at("pieces").is_array() || j.at("pieces").empty())
        throw ParseError("measure spec needs a non-empty 'pieces' array");
    std::vector<Piece> pieces;
    double total = 0.0;
    for (const json& p : j.at("pieces")) {
        const std::string kind = p.value("kind", "");
        if (kind == "atom") {
            Atom a{require_number(p, "x"), require_number(p, "w")};
            total += a.w;
            pieces.emplace_back(a);
        } else if (kind == "uniform") {
            UniformPiece u{require_number(p, "a"), require_number(p, "b"), require_number(p, "w")};
            total += u.w;
            pieces.emplace_back(u);
        } else {
            throw ParseError("piece kind must be 'atom' or 'uniform'");
        }
    }
    if (std::abs(total - 1.0) > 1e-9) throw ParseError("measure weights must sum to 1 within 1e-9");
    for (Piece& p : pieces) {
        if (Atom* a = std::get_if<Atom>(&p))
            a->w /= total;
        else
            std::get<UniformPiece>(p).w /= total;
    }
    try {
        return Measure(std::move(pieces));
    } catch (const InvariantError& e) {
        throw ParseError(e.what());
    }
}

SpikeSet spikes_from(const json& j) {
    std::vector<SpikeEntry> entries;
    for (const json& s : j) {
        if (!s.is_array() || s.size() != 2) throw ParseError("each spike must be [theta, multiplicity]");
        entries.push_back({s.at(0).get<double>(), s.at(1).get<int>()});
    }
    try {
        return SpikeSet(std::move(entries));
    } catch (const InvariantError& e) {
        throw ParseError(e.what());
    }
}

std::vector<Interval> gaps_from(const json& j) {
    std::vector<Interval> gaps;
    for (const json& g : j) {
        if (!g.is_array() || g.size() != 2) throw ParseError("each gap must be [a, b]");
        gaps.push_back({g.at(0).get<double>(), g.at(1).get<double>()});
    }
    return gaps;
}

EntryDist dist_from(const json& j) {
    EntryDist d;
    const std::string tag = j.value("tag", "gaussian");
    if (tag == "gaussian")
        d.law = EntryLaw::gaussian;
    else if (tag == "uniform_symmetric")
        d.law = EntryLaw::uniform_symmetric;
    else
        throw ParseError("dist tag must be 'gaussian' or 'uniform_symmetric'");
    d.variance = require_number(j, "variance");
    if (!(d.variance > 0.0)) throw ParseError("dist variance must be > 0");
    return d;
}

ojson piece_json(const Piece& p) {
    ojson o;
    if (const Atom* a = std::get_if<Atom>(&p)) {
        o["kind"] = "atom";
        o["x"] = a->x;
        o["w"] = a->w;
    } else {
        const auto& u = std::get<UniformPiece>(p);
        o["kind"] = "uniform";
        o["a"] = u.a;
        o["b"] = u.b;
        o["w"] = u.w;
    }
    return o;
}

ojson intervals_json(const SupportComponents& comps) {
    ojson arr = ojson::array();
    for (const Interval& c : comps) arr.push_back(ojson::array({c.lo, c.hi}));
    return arr;
}

ojson prediction_json(const SpikePrediction& p, bool with_ranks) {
    ojson o;
    o["theta"] = p.theta;
    o["multiplicity"] = p.multiplicity;
    o["case"] = to_string(p.cls.tag);
    if (p.cls.tag == SpikeCase::bulk_quantile) o["alpha"] = p.cls.alpha;
    if (p.cls.component >= 0) o["component"] = p.cls.component;
    o["limit"] = p.limit;
    if (with_ranks) o["ranks"] = p.ranks;
    return o;
}

ojson measure_json_obj(const Measure& nu) {
    ojson pieces = ojson::array();
    for (const Piece& p : nu.pieces()) pieces.push_back(piece_json(p));
    ojson o;
    o["pieces"] = std::move(pieces);
    return o;
}

} // namespace

Measure parse_measure_spec(const std::string& text) {
    return guarded([&] { return measure_from(parse_text(text)); });
}

std::string measure_spec_json(const Measure& nu) { return measure_json_obj(nu).dump(); }

SupportConfig parse_support_config(const std::string& text) {
    return guarded([&] {
    const json j = parse_text(text);
    SupportConfig cfg;
    if (!j.contains("measure")) throw ParseError("config needs a 'measure' field");
    cfg.measure = measure_from(j.at("measure"));
    cfg.sigma = require_number(j, "sigma");
    if (!(cfg.sigma > 0.0)) throw ParseError("sigma must be > 0");
    cfg.resolution = j.value("resolution", kDefaultGridPerUnit);
    return cfg;
    });
}

DensityConfig parse_density_config(const std::string& text) {
    return guarded([&] {
    const json j = parse_text(text);
    DensityConfig cfg;
    cfg.base = parse_support_config(text);
    if (j.contains("grid")) {
        cfg.grid_points = j.at("grid").value("points", cfg.grid_points);
        cfg.pad = j.at("grid").value("pad", cfg.pad);
    }
    return cfg;
    });
}

ClassifyConfig parse_classify_config(const std::string& text) {
    return guarded([&] {
    const json j = parse_text(text);
    ClassifyConfig cfg;
    if (!j.contains("measure")) throw ParseError("config needs a 'measure' field");
    cfg.measure = measure_from(j.at("measure"));
    cfg.sigma = require_number(j, "sigma");
    if (!(cfg.sigma > 0.0)) throw ParseError("sigma must be > 0");
    if (!j.contains("spikes")) throw ParseError("config needs a 'spikes' field");
    cfg.spikes = spikes_from(j.at("spikes"));
    cfg.n = j.value("n", 0);
    cfg.resolution = j.value("resolution", kDefaultGridPerUnit);
    return cfg;
    });
}

VerifyConfig parse_verify_config(const std::string& text) {
    return guarded([&] {
    const json j = parse_text(text);
    VerifyConfig cfg;
    if (!j.contains("n") || !j.at("n").is_number_integer()) throw ParseError("config needs integer 'n'");
    cfg.n = j.at("n").get<int>();
    if (!j.contains("dist")) throw ParseError("config needs a 'dist' field");
    cfg.dist = dist_from(j.at("dist"));
    if (!j.contains("measure")) throw ParseError("config needs a 'measure' field");
    cfg.measure = measure_from(j.at("measure"));
    cfg.spikes = j.contains("spikes") ? spikes_from(j.at("spikes")) : SpikeSet();
    if (!j.contains("seed")) throw ParseError("config needs a 'seed' field");
    cfg.seed = j.at("seed").get<std::uint64_t>();
    if (!j.contains("trials")) throw ParseError("config needs a 'trials' field");
    cfg.trials = j.at("trials").get<int>();
    if (j.contains("gaps")) cfg.gaps = gaps_from(j.at("gaps"));
    cfg.resolution = j.value("resolution", kDefaultGridPerUnit);
    cfg.emit_eigenvalues = j.value("emit_eigenvalues", false);
    cfg.threads = j.value("threads", 0);
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        cfg.tol.outlier = t.value("outlier", cfg.tol.outlier);
        cfg.tol.ks = t.value("ks", cfg.tol.ks);
        cfg.tol.inclusion_eps = t.value("inclusion_eps", cfg.tol.inclusion_eps);
        cfg.tol.min_seed_successes = t.value("min_seed_successes", cfg.tol.min_seed_successes);
    }
    return cfg;
    });
}

std::string config_hash_hex(const std::string& json_text) {
    const std::string canonical = parse_text(json_text).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << h;
    return out.str();
}

std::string support_report_json(const FreeConvolution& model, const std::string& config_hash) {
    ojson o;
    o["artifact_version"] = kVersion;
    o["config_hash"] = config_hash;
    o["sigma"] = model.sigma();
    o["u_components"] = intervals_json(model.u_components());
    o["support"] = intervals_json(model.support());
    o["masses"] = model.component_masses();
    return o.dump(2) + "\n";
}

std::string classify_report_json(const std::vector<SpikePrediction>& predictions, double sigma,
                                 int n, const std::string& config_hash) {
    ojson o;
    o["artifact_version"] = kVersion;
    o["config_hash"] = config_hash;
    o["sigma"] = sigma;
    if (n > 0) o["n"] = n;
    ojson arr = ojson::array();
    for (const SpikePrediction& p : predictions) arr.push_back(prediction_json(p, n > 0));
    o["predictions"] = std::move(arr);
    return o.dump(2) + "\n";
}

std::string verify_report_json(const VerifyReport& rep, const VerifyConfig& cfg,
                               const std::string& config_hash, bool include_timestamp) {
    ojson o;
    o["artifact_version"] = kVersion;
    o["config_hash"] = config_hash;
    o["rng"] = kRngName;
    if (include_timestamp)
        o["generated_at"] = std::chrono::duration_cast<std::chrono::seconds>(
                                std::chrono::system_clock::now().time_since_epoch())
                                .count();

    ojson c;
    c["n"] = cfg.n;
    c["dist"] = {{"tag", to_string(cfg.dist.law)}, {"variance", cfg.dist.variance}};
    c["measure"] = measure_json_obj(cfg.measure);
    ojson spikes = ojson::array();
    for (const SpikeEntry& e : cfg.spikes.entries())
        spikes.push_back(ojson::array({e.theta, e.multiplicity}));
    c["spikes"] = std::move(spikes);
    c["seed"] = cfg.seed;
    c["trials"] = cfg.trials;
    c["gaps"] = intervals_json(cfg.gaps);
    c["resolution"] = cfg.resolution;
    c["tolerances"] = {{"outlier", cfg.tol.outlier},
                       {"ks", cfg.tol.ks},
                       {"inclusion_eps", cfg.tol.inclusion_eps},
                       {"min_seed_successes", rep.required_seed_successes}};
    o["config"] = std::move(c);

    ojson model;
    model["sigma"] = rep.sigma;
    model["u_components"] = intervals_json(rep.u_components);
    model["support"] = intervals_json(rep.support);
    model["masses"] = rep.masses;
    o["model"] = std::move(model);

    ojson preds = ojson::array();
    for (const SpikePrediction& p : rep.predictions) preds.push_back(prediction_json(p, true));
    o["predictions"] = std::move(preds);

    ojson trials = ojson::array();
    for (const TrialResult& t : rep.trials) {
        ojson tj;
        tj["seed"] = t.seed;
        tj["lambda_max"] = t.lambda_max;
        tj["lambda_min"] = t.lambda_min;
        tj["ks_distance"] = t.report.ks_distance;
        ojson oes = ojson::array();
        for (const OutlierError& oe : t.report.outlier_errors)
            oes.push_back({{"theta", oe.theta},
                           {"rank", oe.rank},
                           {"predicted", oe.predicted},
                           {"observed", oe.observed},
                           {"abs_error", oe.abs_error},
                           {"match", oe.match}});
        tj["outlier_errors"] = std::move(oes);
        ojson seps = ojson::array();
        for (const SeparationCheck& sc : t.report.separation)
            seps.push_back({{"a", sc.a},
                            {"b", sc.b},
                            {"a_prime", sc.a_prime},
                            {"b_prime", sc.b_prime},
                            {"count_m_above_b", sc.count_m_above_b},
                            {"count_a_above_b_prime", sc.count_a_above_b_prime},
                            {"match", sc.match},
                            {"m_eigs_in_gap", sc.m_eigs_in_gap}});
        tj["separation"] = std::move(seps);
        tj["inclusion_violations"] = t.report.inclusion_violations;
        if (!t.report.eigenvalues.empty()) tj["eigenvalues"] = t.report.eigenvalues;
        trials.push_back(std::move(tj));
    }
    o["trials"] = std::move(trials);

    ojson agg;
    ojson sp = ojson::array();
    for (const SpikeAggregate& a : rep.spike_aggregates)
        sp.push_back({{"theta", a.theta},
                      {"case", to_string(a.tag)},
                      {"limit", a.limit},
                      {"median_abs_error", a.median_abs_error},
                      {"tolerance", cfg.tol.outlier},
                      {"pass", a.pass}});
    agg["spikes"] = std::move(sp);
    agg["ks"] = {{"median", rep.median_ks}, {"tolerance", cfg.tol.ks}, {"pass", rep.ks_pass}};
    agg["inclusion"] = {{"clean_seeds", rep.inclusion_clean_seeds},
                        {"required", rep.required_seed_successes},
                        {"epsilon", cfg.tol.inclusion_eps},
                        {"pass", rep.inclusion_pass}};
    ojson gp = ojson::array();
    for (const GapAggregate& g : rep.gap_aggregates)
        gp.push_back({{"a", g.a},
                      {"b", g.b},
                      {"seeds_matched", g.seeds_matched},
                      {"required", rep.required_seed_successes},
                      {"pass", g.pass}});
    agg["separation"] = std::move(gp);
    agg["pass"] = rep.pass;
    o["aggregate"] = std::move(agg);

    return o.dump(2) + "\n";
}

} // namespace freeconv
