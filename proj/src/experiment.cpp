#include "ptk/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ptk/cantor.hpp"
#include "ptk/champagne.hpp"
#include "ptk/hausdorff.hpp"
#include "ptk/hitting.hpp"

namespace ptk {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown field '" + it.key() +
                                        "' in " + where);
}

std::string iso_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    return h;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

Domain unit_ball(int d, double R) {
    return {DomainKind::ball, d, Eigen::VectorXd::Zero(d), R};
}

// deterministic quasi-uniform probe points on the sphere |x| = R
std::vector<Eigen::VectorXd> sphere_points(int d, double R, int count) {
    std::vector<Eigen::VectorXd> pts;
    if (d == 2) {
        for (int i = 0; i < count; ++i) {
            double a = 2.0 * M_PI * (i + 0.25) / count;
            Eigen::VectorXd p(2);
            p << R * std::cos(a), R * std::sin(a);
            pts.push_back(p);
        }
    } else {
        const double ga = M_PI * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            double z = 1.0 - 2.0 * (i + 0.5) / count;
            double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            Eigen::VectorXd p(3);
            p << R * rho * std::cos(ga * i), R * rho * std::sin(ga * i), R * z;
            pts.push_back(p);
        }
    }
    return pts;
}

std::string bubbles_csv(const BubbleConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "shell,radius";
    int d = cfg.domain.d;
    for (int k = 0; k < d; ++k) os << ",x" << k;
    os << "\n";
    for (const auto& b : cfg.bubbles) {
        os << b.shell << "," << b.radius;
        for (int k = 0; k < d; ++k) os << "," << b.center[k];
        os << "\n";
    }
    return os.str();
}

std::string certificates_csv(const CantorRun& run) {
    std::ostringstream os;
    os.precision(17);
    os << "m,n,r,iii_lo,iii_mid,iii_hi,two_r,a_over_n,covering_bound,threshold\n";
    for (const auto& c : run.certs)
        os << c.m << "," << c.n << "," << c.r << "," << c.iii_lo << ","
           << c.iii_mid << "," << c.iii_hi << "," << c.two_r << ","
           << c.a_over_n << "," << c.covering_bound << ","
           << c.covering_threshold << "\n";
    return os.str();
}

std::string estimates_csv(const std::vector<HittingEstimate>& ests) {
    std::ostringstream os;
    os.precision(17);
    os << "probe,p_hat,std_err,bias_bound,n_samples\n";
    for (std::size_t i = 0; i < ests.size(); ++i)
        os << i << "," << ests[i].p_hat << "," << ests[i].std_err << ","
           << ests[i].truncation_bias_bound << "," << ests[i].n_samples << "\n";
    return os.str();
}

void emit_bubble_artifacts(const BubbleConfig& bc, const fs::path& dir,
                           RunRecord& rec) {
    write_text(dir / "bubbles.csv", bubbles_csv(bc));
    rec.artifacts.push_back("bubbles.csv");
    std::vector<std::pair<double, double>> centers;
    std::vector<double> radii;
    for (const auto& b : bc.bubbles) {
        centers.emplace_back(b.center[0], b.center[1]);
        radii.push_back(b.radius);
    }
    double extent = bc.domain.kind == DomainKind::ball ? 1.1 * bc.domain.R : 0.0;
    if (extent == 0.0)
        for (const auto& b : bc.bubbles)
            extent = std::max(extent, 1.1 * (b.center.norm() + b.radius));
    write_text(dir / "bubbles.svg", scatter_svg(centers, radii, extent));
    rec.artifacts.push_back("bubbles.svg");
}

void run_cantor_stage(const ExperimentConfig& cfg, const fs::path& dir,
                      RunRecord& rec) {
    auto p = profile_from_config(cfg);
    auto phi = phi_from_config(cfg, p);
    auto run = run_cantor(p, phi, cfg.depth, 128, cfg.seed);
    rec.metric("c1", run.c1);
    bool all_hold = true;
    for (const auto& c : run.certs) {
        std::string tag = "step" + std::to_string(c.m) + ".";
        rec.metric(tag + "n", c.n);
        rec.metric(tag + "r", c.r);
        rec.metric(tag + "covering_bound", c.covering_bound);
        rec.metric(tag + "iii_lo", c.iii_lo);
        rec.metric(tag + "iii_mid", c.iii_mid);
        rec.metric(tag + "iii_hi", c.iii_hi);
        all_hold = all_hold && c.holds();
    }
    rec.verdict("certificates_hold", all_hold);
    write_text(dir / "certificates.csv", certificates_csv(run));
    rec.artifacts.push_back("certificates.csv");

    auto prof = content_upper_profile(run, phi);
    write_text(dir / "content_profile.csv", content_profile_csv(prof));
    rec.artifacts.push_back("content_profile.csv");
    for (const auto& pt : prof)
        if (!(pt.bound < pt.rho)) rec.verdict("content_below_threshold", false);

    if (cfg.pipeline == "hausdorff") {
        bool bounded = false;
        double fit = dim_upper_fit(natural_cover_counts(run),
                                   exponent_grid(0.5, double(cfg.d)), &bounded);
        rec.metric("dim_fit", fit);
        double target = cfg.profile_kind == "riesz" ? cfg.d - cfg.alpha
                                                    : double(cfg.d);
        rec.verdict("dim_fit_bounded", bounded);
        rec.verdict("dim_fit_within_target", fit <= target + 0.1);
    }
}

void run_champagne_stage(const ExperimentConfig& cfg, const fs::path& dir,
                         RunRecord& rec, BubbleConfig* out) {
    auto p = profile_from_config(cfg);
    p.C_G = validate_decay(p, {0.1, 0.5, 1.0});
    auto phi = phi_from_config(cfg, p);
    auto bc = boundary_cover_config(unit_ball(cfg.d, cfg.domain_R), p, phi,
                                    cfg.delta, nullptr, cfg.depth, cfg.seed);
    rec.metric("budget", bc.budget);
    rec.metric("bubbles", double(bc.bubbles.size()));
    for (std::size_t n = 0; n < bc.per_shell_budget.size(); ++n)
        rec.metric("shell" + std::to_string(n + 1) + ".budget",
                   bc.per_shell_budget[n]);
    rec.verdict("budget_below_delta", bc.budget < cfg.delta);
    bool inv = true;
    try {
        assert_bubble_invariants(bc);
    } catch (const std::exception&) {
        inv = false;
    }
    rec.verdict("bubble_invariants", inv);
    emit_bubble_artifacts(bc, dir, rec);
    if (out) *out = bc;
}

void run_verify_stage(const ExperimentConfig& cfg, const fs::path& dir,
                      RunRecord& rec) {
    auto p = profile_from_config(cfg);
    p.C_G = validate_decay(p, {0.1, 0.5, 1.0});
    auto phi = phi_from_config(cfg, p);
    if (cfg.profile_kind == "classical") {
        auto bc = boundary_cover_config(unit_ball(cfg.d, cfg.domain_R), p, phi,
                                        cfg.delta, nullptr, cfg.depth, cfg.seed);
        TargetIndex target(bc);
        ProbePlan plan;
        plan.params.seed = cfg.seed;
        int shells = std::min(3, cfg.depth);
        for (int n = 1; n <= shells; ++n) {
            double R = cfg.domain_R * (1.0 - std::pow(0.5, n));
            for (auto& x : sphere_points(cfg.d, R, 16)) plan.on_A.push_back(x);
        }
        plan.free_points.push_back(Eigen::VectorXd::Zero(cfg.d));
        auto rep = verify_unavoidable(target, p, unit_ball(cfg.d, cfg.domain_R),
                                      plan, cfg.kappa, cfg.samples);
        rec.metric("min_lower", rep.min_lower);
        rec.metric("free_p_hat", rep.free_points[0].p_hat);
        rec.verdict("min_lower_ge_kappa", rep.satisfied);
        write_text(dir / "estimates.csv", estimates_csv(rep.on_A));
        rec.artifacts.push_back("estimates.csv");
        emit_bubble_artifacts(bc, dir, rec);
        return;
    }
    // riesz: sparse shells at |z| = 4^n with radii making the escape-sum small,
    // checked against the stable walk from the origin
    BubbleConfig bc;
    bc.profile = p;
    bc.domain = Domain{DomainKind::whole_space, cfg.d, {}, 0};
    int shells = std::min(6, cfg.depth);
    const int per_shell = 8;
    double allowance = 0.05 / double(per_shell * shells);
    for (int n = 1; n <= shells; ++n) {
        double R = std::pow(4.0, n);
        double r = R * std::pow(allowance, 1.0 / (cfg.d - cfg.alpha));
        for (auto& z : sphere_points(cfg.d, R, per_shell))
            bc.bubbles.push_back({z, r, n});
    }
    TargetIndex target(bc);
    double bound = target.escape_bound(p, Eigen::VectorXd::Zero(cfg.d));
    WalkParams wp;
    wp.seed = cfg.seed;
    wp.escape_radius = 4.0 * std::pow(4.0, shells);
    auto est = stable_hit(target, Eigen::VectorXd::Zero(cfg.d), p, wp, cfg.samples);
    rec.metric("escape_sum", bound);
    rec.metric("p_hat", est.p_hat);
    rec.metric("bias_bound", est.truncation_bias_bound);
    rec.verdict("escape_sum_small", bound < 0.1);
    rec.verdict("avoidable", est.p_hat + est.truncation_bias_bound <= 0.2);
    write_text(dir / "estimates.csv", estimates_csv({est}));
    rec.artifacts.push_back("estimates.csv");
    emit_bubble_artifacts(bc, dir, rec);
}

void run_full_stage(const ExperimentConfig& cfg, const fs::path& dir,
                    RunRecord& rec) {
    BubbleConfig bc;
    run_champagne_stage(cfg, dir, rec, &bc);

    // the Cantor-type prototype set F, built in the reference plane profile
    auto pf = make_riesz(2, 1.0);
    auto fr = run_cantor(pf, phi_cap_over_log(pf), std::min(cfg.depth, 2), 128,
                         cfg.seed);
    bool holds = true;
    for (const auto& c : fr.certs) holds = holds && c.holds();
    rec.verdict("cantor_certificates_hold", holds);
    write_text(dir / "certificates.csv", certificates_csv(fr));
    rec.artifacts.push_back("certificates.csv");

    auto ps = replace_with_pattern(bc, 0.5);
    rec.metric("pattern_placements", double(ps.placements.size()));
    {
        std::ostringstream os;
        os.precision(17);
        os << "scale,radius";
        for (int k = 0; k < cfg.d; ++k) os << ",x" << k;
        os << "\n";
        for (const auto& [z, r] : ps.placements) {
            os << r << "," << r * ps.ball_radius;
            for (int k = 0; k < cfg.d; ++k) os << "," << z[k];
            os << "\n";
        }
        write_text(dir / "pattern.csv", os.str());
        rec.artifacts.push_back("pattern.csv");
    }

    auto p = profile_from_config(cfg);
    p.C_G = validate_decay(p, {0.1, 0.5, 1.0});
    TargetIndex target(ps);
    ProbePlan plan;
    plan.params.seed = cfg.seed;
    double R1 = cfg.domain_R * 0.5;
    for (auto& x : sphere_points(cfg.d, R1, 8)) plan.on_A.push_back(x);
    if (cfg.profile_kind != "classical") plan.params.escape_radius = 100.0;
    auto rep = verify_unavoidable(target, p, unit_ball(cfg.d, cfg.domain_R),
                                  plan, cfg.kappa, cfg.samples);
    rec.metric("min_lower", rep.min_lower);
    rec.verdict("min_lower_ge_kappa", rep.satisfied);
    write_text(dir / "estimates.csv", estimates_csv(rep.on_A));
    rec.artifacts.push_back("estimates.csv");
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j = json::parse(json_text);
    reject_unknown(j, {"schema_version", "pipeline", "profile", "phi", "domain",
                       "delta", "eta", "kappa", "depth", "samples", "seed", "out"},
                   "root");
    ExperimentConfig cfg;
    if (!j.contains("schema_version"))
        throw std::invalid_argument("config: schema_version required");
    cfg.schema_version = j.at("schema_version").get<int>();
    if (cfg.schema_version != 1)
        throw std::invalid_argument("config: unsupported schema_version");
    cfg.pipeline = j.at("pipeline").get<std::string>();
    static const std::set<std::string> pipelines{"cantor", "champagne", "verify",
                                                 "hausdorff", "full"};
    if (!pipelines.count(cfg.pipeline))
        throw std::invalid_argument("config: unknown pipeline '" + cfg.pipeline + "'");

    if (j.contains("profile")) {
        const auto& jp = j["profile"];
        reject_unknown(jp, {"kind", "d", "alpha"}, "profile");
        cfg.profile_kind = jp.value("kind", cfg.profile_kind);
        cfg.d = jp.value("d", cfg.d);
        cfg.alpha = jp.value("alpha", cfg.alpha);
    }
    static const std::set<std::string> kinds{"classical", "riesz", "logarithmic"};
    if (!kinds.count(cfg.profile_kind))
        throw std::invalid_argument("config: unknown profile kind");
    if (cfg.d < 1 || cfg.d > 3) throw std::invalid_argument("config: d in 1..3");
    if (cfg.profile_kind == "riesz" &&
        !(cfg.alpha > 0 && cfg.alpha < 2 && cfg.alpha < cfg.d))
        throw std::invalid_argument("config: alpha in (0, min(d, 2))");

    if (j.contains("phi")) {
        const auto& jf = j["phi"];
        reject_unknown(jf, {"family", "exponent"}, "phi");
        cfg.phi_family = jf.value("family", cfg.phi_family);
        cfg.phi_exponent = jf.value("exponent", cfg.phi_exponent);
    }
    static const std::set<std::string> families{"cap_over_log", "cap_times_power",
                                                "power"};
    if (!families.count(cfg.phi_family))
        throw std::invalid_argument("config: unknown phi family");

    if (j.contains("domain")) {
        const auto& jd = j["domain"];
        reject_unknown(jd, {"R"}, "domain");
        cfg.domain_R = jd.value("R", cfg.domain_R);
    }
    if (!(cfg.domain_R > 0)) throw std::invalid_argument("config: domain R > 0");

    cfg.delta = j.value("delta", cfg.delta);
    cfg.eta = j.value("eta", cfg.eta);
    cfg.kappa = j.value("kappa", cfg.kappa);
    if (!(cfg.delta > 0) || !(cfg.eta > 0) || !(cfg.kappa > 0 && cfg.kappa < 1))
        throw std::invalid_argument("config: delta, eta > 0 and kappa in (0,1)");
    cfg.depth = j.value("depth", cfg.depth);
    if (cfg.depth < 1 || cfg.depth > 8)
        throw std::invalid_argument("config: depth in 1..8");
    cfg.samples = j.value("samples", cfg.samples);
    if (cfg.samples < 1 || cfg.samples > 10000000)
        throw std::invalid_argument("config: samples in 1..1e7");
    if (!j.contains("seed")) throw std::invalid_argument("config: seed required");
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.seed_set = true;
    cfg.out_dir = j.value("out", cfg.out_dir);
    return cfg;
}

std::string config_canonical(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["pipeline"] = cfg.pipeline;
    j["profile"] = {{"kind", cfg.profile_kind}, {"d", cfg.d}, {"alpha", cfg.alpha}};
    j["phi"] = {{"family", cfg.phi_family}, {"exponent", cfg.phi_exponent}};
    j["domain"] = {{"R", cfg.domain_R}};
    j["delta"] = cfg.delta;
    j["eta"] = cfg.eta;
    j["kappa"] = cfg.kappa;
    j["depth"] = cfg.depth;
    j["samples"] = cfg.samples;
    j["seed"] = cfg.seed;
    return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    return fnv1a(config_canonical(cfg));
}

CapacityProfile profile_from_config(const ExperimentConfig& cfg) {
    if (cfg.profile_kind == "classical") return make_classical(cfg.d);
    if (cfg.profile_kind == "logarithmic") return make_logarithmic();
    return make_riesz(cfg.d, cfg.alpha);
}

MeasureFunction phi_from_config(const ExperimentConfig& cfg,
                                const CapacityProfile& p) {
    if (cfg.phi_family == "cap_over_log") return phi_cap_over_log(p);
    if (cfg.phi_family == "cap_times_power")
        return phi_cap_times_power(p, cfg.phi_exponent);
    return phi_power(cfg.phi_exponent);
}

void RunRecord::metric(const std::string& name, double value) {
    metrics.emplace_back(name, value);
}

void RunRecord::verdict(const std::string& name, bool pass) {
    verdicts.emplace_back(name, pass);
}

bool RunRecord::passed() const {
    for (const auto& [name, ok] : verdicts)
        if (!ok) return false;
    return true;
}

double RunRecord::metric_value(const std::string& name) const {
    for (const auto& [n, v] : metrics)
        if (n == name) return v;
    throw std::out_of_range("record: no metric '" + name + "'");
}

RunRecord run_pipeline(const ExperimentConfig& cfg) {
    if (!cfg.seed_set) throw std::invalid_argument("run_pipeline: seed required");
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    RunRecord rec;
    rec.config_hash = config_hash(cfg);
    rec.pipeline = cfg.pipeline;
    rec.started_at = iso_now();
    write_text(dir / "config.json", config_canonical(cfg));

    if (cfg.pipeline == "cantor" || cfg.pipeline == "hausdorff")
        run_cantor_stage(cfg, dir, rec);
    else if (cfg.pipeline == "champagne")
        run_champagne_stage(cfg, dir, rec, nullptr);
    else if (cfg.pipeline == "verify")
        run_verify_stage(cfg, dir, rec);
    else
        run_full_stage(cfg, dir, rec);

    rec.finished_at = iso_now();
    write_record(rec, (dir / "record.jsonl").string());
    return rec;
}

void write_record(const RunRecord& rec, const std::string& path) {
    std::ostringstream os;
    os.precision(17);
    os << json{{"type", "meta"},
               {"config_hash", rec.config_hash},
               {"pipeline", rec.pipeline},
               {"started_at", rec.started_at},
               {"finished_at", rec.finished_at}}
              .dump()
       << "\n";
    for (const auto& [name, value] : rec.metrics)
        os << json{{"type", "metric"}, {"name", name}, {"value", value}}.dump()
           << "\n";
    for (const auto& [name, ok] : rec.verdicts)
        os << json{{"type", "verdict"}, {"name", name}, {"pass", ok}}.dump() << "\n";
    for (const auto& a : rec.artifacts)
        os << json{{"type", "artifact"}, {"path", a}}.dump() << "\n";
    write_text(path, os.str());
}

RunRecord read_record(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    RunRecord rec;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        std::string type = j.at("type").get<std::string>();
        if (type == "meta") {
            rec.config_hash = j.at("config_hash").get<std::uint64_t>();
            rec.pipeline = j.at("pipeline").get<std::string>();
            rec.started_at = j.value("started_at", "");
            rec.finished_at = j.value("finished_at", "");
        } else if (type == "metric") {
            rec.metric(j.at("name").get<std::string>(), j.at("value").get<double>());
        } else if (type == "verdict") {
            rec.verdict(j.at("name").get<std::string>(), j.at("pass").get<bool>());
        } else if (type == "artifact") {
            rec.artifacts.push_back(j.at("path").get<std::string>());
        }
    }
    return rec;
}

RunRecord replay(const std::string& record_dir) {
    fs::path dir(record_dir);
    std::ifstream in(dir / "config.json");
    if (!in) throw std::runtime_error("replay: no config.json in " + record_dir);
    std::stringstream ss;
    ss << in.rdbuf();
    auto cfg = parse_config(ss.str());
    auto stored = read_record((dir / "record.jsonl").string());

    cfg.out_dir = (dir / "replay").string();
    auto fresh = run_pipeline(cfg);
    bool match = fresh.config_hash == stored.config_hash &&
                 fresh.metrics.size() == stored.metrics.size();
    if (fresh.metrics.size() == stored.metrics.size())
        for (std::size_t i = 0; i < fresh.metrics.size(); ++i)
            if (fresh.metrics[i] != stored.metrics[i]) {
                fresh.verdict("replay_match." + stored.metrics[i].first, false);
                match = false;
            }
    fresh.verdict("replay_match", match);
    return fresh;
}

std::string scatter_svg(const std::vector<std::pair<double, double>>& centers,
                        const std::vector<double>& radii, double extent) {
    const double size = 800.0, s = size / (2.0 * extent);
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
       << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << " " << size
       << "\">\n";
    for (std::size_t i = 0; i < centers.size(); ++i)
        os << "<circle cx=\"" << (centers[i].first + extent) * s << "\" cy=\""
           << (extent - centers[i].second) * s << "\" r=\""
           << std::max(radii[i] * s, 0.3)
           << "\" fill=\"none\" stroke=\"black\" stroke-width=\"0.4\"/>\n";
    os << "</svg>\n";
    return os.str();
}

} // namespace ptk
