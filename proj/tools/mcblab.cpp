// mcblab: batch runner for the simulators, reference processes, duality
// tables, suites and the acceptance battery.

#include "CLI11.hpp"

#include "mcb/acceptance.hpp"
#include "mcb/config.hpp"
#include "mcb/duality.hpp"
#include "mcb/dynamics.hpp"
#include "mcb/measures.hpp"
#include "mcb/path_record.hpp"
#include "mcb/reference.hpp"
#include "mcb/stats.hpp"
#include "mcb/suites.hpp"
#include "mcb/svg.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace mcb;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Common {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    unsigned workers = 1;
    std::string out;
    bool quick = false;
};

// Keeps track of written files so a failure can list them.
struct Run {
    std::string command;
    fs::path dir;
    std::string hash;
    std::uint64_t seed = 0;
    std::vector<std::string> artifacts;

    fs::path open(const std::string& name, std::ofstream& os) {
        fs::create_directories(dir);
        const fs::path p = dir / name;
        os.open(p, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + p.string());
        artifacts.push_back(name);
        return p;
    }
    void header(std::ostream& os, const std::string& kind) const { write_csv_header(os, {kind, hash, seed}); }
    void write_text(const std::string& name, const std::string& text) {
        std::ofstream os;
        open(name, os);
        os << text;
    }
};

void write_manifest(Run& run, const std::string& error) {
    fs::create_directories(run.dir);
    std::ofstream os(run.dir / "error_manifest.txt", std::ios::binary);
    os << "# " << tool_version() << " kind=error_manifest config_hash=" << run.hash << " seed=" << run.seed << "\n";
    os << "command = " << run.command << "\n";
    os << "error = " << error << "\n";
    os << "artifacts =";
    for (const auto& a : run.artifacts) os << ' ' << a;
    os << "\n";
}

// CSV reading for `report`: skips '#' lines, splits on commas outside quotes.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        return -1;
    }
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') quoted = !quoted;
        else if (ch == ',' && !quoted) out.emplace_back();
        else out.back() += ch;
    }
    return out;
}

std::optional<Table> read_table(const fs::path& p) {
    std::ifstream in(p);
    if (!in) return std::nullopt;
    Table t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (t.columns.empty()) t.columns = split_csv(line);
        else t.rows.push_back(split_csv(line));
    }
    return t;
}

double cell(const std::vector<std::string>& row, int col) {
    if (col < 0 || col >= static_cast<int>(row.size()) || row[col].empty())
        return std::numeric_limits<double>::quiet_NaN();
    try {
        return std::stod(row[col]);
    } catch (...) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

// Plots regenerated purely from the CSV files in `dir`.
std::vector<std::string> plots_from_dir(const fs::path& dir, Run* run) {
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& svg) {
        if (run) {
            run->write_text(name, svg);
        } else {
            std::ofstream os(dir / name, std::ios::binary);
            os << svg;
        }
        written.push_back(name);
    };

    if (auto t = read_table(dir / "paths.csv")) {
        const int ci = t->column("replica"), ct = t->column("time_model"), c1 = t->column("z1"),
                  c2 = t->column("z2");
        std::map<double, std::pair<Accumulator, Accumulator>> by_time;
        Series r1{"replica 0: z1", {}, {}}, r2{"replica 0: z2", {}, {}};
        for (const auto& row : t->rows) {
            const double time = cell(row, ct);
            by_time[time].first.add(cell(row, c1));
            by_time[time].second.add(cell(row, c2));
            if (cell(row, ci) == 0.0) {
                r1.x.push_back(time);
                r1.y.push_back(cell(row, c1));
                r2.x.push_back(time);
                r2.y.push_back(cell(row, c2));
            }
        }
        Series m1{"mean z1", {}, {}}, m2{"mean z2", {}, {}};
        for (const auto& [time, acc] : by_time) {
            m1.x.push_back(time);
            m1.y.push_back(acc.first.mean());
            m2.x.push_back(time);
            m2.y.push_back(acc.second.mean());
        }
        emit("totals.svg", line_chart_svg({"Totals over time", "model time", "total"}, {m1, m2, r1, r2}));
    }

    if (auto t = read_table(dir / "reports.csv")) {
        // name = <series>.<key>=<value>: one curve per series over value.
        const int cn = t->column("name"), cs = t->column("statistic");
        std::map<std::string, Series> curves;
        for (const auto& row : t->rows) {
            if (cn < 0 || cn >= static_cast<int>(row.size())) continue;
            const std::string& name = row[cn];
            const auto dot = name.rfind('.');
            const auto eq = name.find('=', dot == std::string::npos ? 0 : dot);
            if (dot == std::string::npos || eq == std::string::npos) continue;
            double x = 0.0;
            try {
                x = std::stod(name.substr(eq + 1));
            } catch (...) {
                continue;
            }
            const std::string label = name.substr(0, dot);
            if (label.find(".ks.") == std::string::npos && label.find(".diff") == std::string::npos) continue;
            auto& s = curves[label];
            s.label = label;
            s.markers = false;
            s.x.push_back(x);
            s.y.push_back(cell(row, cs));
        }
        if (!curves.empty()) {
            std::vector<Series> all;
            for (auto& [label, s] : curves) all.push_back(s);
            emit("trend.svg", line_chart_svg({"Distance to the limit", "N or gamma", "statistic", true}, all));
        }
    }

    if (auto t = read_table(dir / "nu_moments.csv")) {
        const int cx = t->column("x");
        std::vector<Series> all;
        for (const char* col : {"axis1_second_moment_restricted", "axis1_second_moment_sampled",
                                "axis2_second_moment", "axis2_second_moment_sampled"}) {
            const int c = t->column(col);
            if (c < 0) continue;
            Series s{col, {}, {}, std::string(col).find("sampled") != std::string::npos};
            for (const auto& row : t->rows) {
                s.x.push_back(cell(row, cx));
                s.y.push_back(cell(row, c));
            }
            all.push_back(s);
        }
        if (!all.empty())
            emit("nu_moments.svg", line_chart_svg({"Truncated second moments of nu", "x", "moment", true}, all));
    }
    return written;
}

// --- processes -------------------------------------------------------------

std::vector<BoundaryPoint> initial_sites(const ExperimentConfig& c, Rng& rng) {
    switch (c.initial) {
        case InitialKind::HalfHalf: return SystemState::half_half(c.n, c.m1, c.m2).sites();
        case InitialKind::List: return c.sites;
        case InitialKind::Stationary: {
            std::vector<BoundaryPoint> out;
            for (std::size_t k = 0; k < c.n; ++k) out.push_back(harmonic_sample(c.theta, rng));
            return out;
        }
    }
    return {};
}

double model_horizon(const ExperimentConfig& c) { return c.horizon_rescaled ? c.horizon * time_scale(c.n) : c.horizon; }

PathRecord initial_only(const std::vector<BoundaryPoint>& sites) {
    PathRecord rec;
    rec.push(0.0, SystemState(sites).totals());
    return rec;
}

PathRecord run_one(const ExperimentConfig& c, Rng& rng) {
    const double horizon = model_horizon(c);
    switch (c.process) {
        case Process::McbInfinity: {
            const SystemState init(initial_sites(c, rng));
            if (horizon == 0.0) return initial_only(init.sites());
            SimParams p;
            p.scheme = c.scheme == "tau_leap" ? Scheme::TauLeap : Scheme::HarmonicSplit;
            p.h = c.h;
            if (c.delta) p.window = TruncationWindow(*c.delta);
            p.horizon = horizon;
            p.record_every = c.record_every;
            return simulate(init, p, rng);
        }
        case Process::McbGamma: {
            const SystemState init(initial_sites(c, rng));
            if (horizon == 0.0) return initial_only(init.sites());
            GammaParams g;
            g.gamma = *c.gamma;
            g.h = c.h;
            g.scheme = c.scheme == "euler_clamp" ? GammaScheme::EulerClamp : GammaScheme::SplitExit;
            g.record_every = c.record_every;
            return simulate_mcb_gamma(init.quadrant_points(), g, horizon, rng);
        }
        case Process::LimitDiffusion: {
            const Vec2 z = SystemState(initial_sites(c, rng)).totals();
            PathRecord rec;
            DiffusionState s{z.x1, z.x2};
            rec.push(0.0, z);
            const auto steps = static_cast<std::size_t>(std::ceil(horizon / c.h - 1e-9));
            for (std::size_t i = 1; i <= steps; ++i) {
                const double t = std::min(horizon, i * c.h);
                s = limit_diffusion_step(s, t - (i - 1) * c.h, rng);
                if (i % c.record_every == 0 || i == steps) rec.push(t, {s.z1, s.z2});
            }
            return rec;
        }
        case Process::YTheta: {
            // One site; z1, z2 are its coordinates.
            BoundaryPoint y = c.initial == InitialKind::Stationary ? harmonic_sample(c.theta, rng)
                              : c.initial == InitialKind::List  ? c.sites.front()
                                                                : BoundaryPoint::type1(c.m1);
            PathRecord rec;
            rec.push(0.0, y.vec());
            const auto steps = static_cast<std::size_t>(std::ceil(horizon / c.h - 1e-9));
            for (std::size_t i = 1; i <= steps; ++i) {
                const double t = std::min(horizon, i * c.h);
                y = y_theta_step(y, c.theta, t - (i - 1) * c.h, rng);
                if (i % c.record_every == 0 || i == steps) rec.push(t, y.vec());
            }
            return rec;
        }
    }
    throw std::logic_error("unknown process");
}

int run_paths(const ExperimentConfig& c, const Common& common, Run& run) {
    const double beta = c.process == Process::McbInfinity || c.process == Process::McbGamma
                            ? (c.n >= 3 ? time_scale(c.n) : 0.0)
                            : 0.0;
    std::ofstream paths, finals;
    run.open("paths.csv", paths);
    run.header(paths, "path");
    paths << "replica,time_model,time_rescaled,z1,z2\n";
    run.open("final.csv", finals);
    run.header(finals, "final");
    finals << "replica,z1,z2\n";
    // Chunks keep memory flat and leave complete rows behind on failure.
    const std::size_t chunk = 256;
    std::string incomplete;
    for (std::size_t start = 0; start < c.replicas; start += chunk) {
        const std::size_t count = std::min(chunk, c.replicas - start);
        auto recs = run_replicas<PathRecord>(count, c.seed, common.workers, [&](std::size_t r, Rng&) {
            Rng rng(c.seed, start + r);
            return run_one(c, rng);
        });
        for (std::size_t r = 0; r < count; ++r) {
            write_path_rows(paths, start + r, recs[r], beta);
            finals << start + r << ',' << format_double(recs[r].final_totals().x1) << ','
                   << format_double(recs[r].final_totals().x2) << '\n';
            if (!recs[r].complete && incomplete.empty())
                incomplete = "replica " + std::to_string(start + r) + ": " + recs[r].error;
        }
        paths.flush();
        finals.flush();
    }
    paths.close();
    finals.close();
    if (c.plots) plots_from_dir(run.dir, &run);
    if (!incomplete.empty()) throw std::runtime_error("incomplete path, " + incomplete);
    std::cout << "wrote " << c.replicas << " paths to " << (run.dir / "paths.csv").string() << "\n";
    return kExitPass;
}

void write_reports(Run& run, const std::vector<TestReport>& reports) {
    std::ofstream os;
    run.open("reports.csv", os);
    run.header(os, "report");
    os << "name,statistic,threshold,n,pass,seed,config_hash,note\n";
    for (const auto& r : reports)
        os << '"' << r.name << "\"," << format_double(r.statistic) << ',' << format_double(r.threshold) << ','
           << r.n << ',' << (r.pass ? 1 : 0) << ',' << r.seed << ',' << run.hash << ",\"" << r.note << "\"\n";
}

int run_suite(const ExperimentConfig& c, const Common& common, Run& run) {
    std::vector<TestReport> reports;
    if (c.suite == SuiteKind::Theorem0) {
        GammaSuiteOptions g;
        g.gamma_grid = c.gamma_grid;
        g.n = c.n;
        g.t = c.horizon;
        g.replicas = c.replicas;
        g.seed = c.seed;
        g.workers = common.workers;
        g.h = c.h;
        g.m1 = c.m1;
        g.m2 = c.m2;
        reports = theorem0_suite(g);
    } else {
        LargeNOptions o;
        o.n_grid = c.n_grid;
        o.t = c.horizon;
        o.replicas = c.replicas;
        o.seed = c.seed;
        o.workers = common.workers;
        o.m1 = c.m1;
        o.m2 = c.m2;
        const auto batteries = run_large_n_batteries(o);
        const auto reference = limit_reference(batteries.front().z0, o);
        if (c.suite == SuiteKind::Theorem1) reports = theorem1_suite(batteries, reference, o);
        if (c.suite == SuiteKind::Theorem2)
            reports = theorem2_suite(batteries, reference, default_theorem2_probes(), default_path_probe(), o);
        if (c.suite == SuiteKind::SupMoment) reports = sup_moment_suite(batteries, o);
    }
    for (auto& r : reports) r.config_hash = run.hash;
    write_reports(run, reports);
    if (c.plots) plots_from_dir(run.dir, &run);
    std::size_t failed = 0;
    for (const auto& r : reports) {
        std::cout << (r.pass ? "pass " : "FAIL ") << r.name << " " << format_double(r.statistic)
                  << " <= " << format_double(r.threshold) << "\n";
        failed += !r.pass;
    }
    std::cout << reports.size() - failed << "/" << reports.size() << " reports pass\n";
    return failed == 0 ? kExitPass : kExitFail;
}

int cmd_simulate(const ExperimentConfig& c, const Common& common, Run& run) {
    if (c.suite != SuiteKind::None) return run_suite(c, common, run);
    if (c.process != Process::McbInfinity)
        throw ConfigError("[run].process: simulate runs mcb_infinity; use `reference` for " +
                          std::string(to_string(c.process)));
    return run_paths(c, common, run);
}

int cmd_reference(const ExperimentConfig& c, const Common& common, Run& run) {
    if (c.process == Process::McbInfinity)
        throw ConfigError("[run].process: reference runs mcb_gamma, limit_diffusion or y_theta");
    return run_paths(c, common, run);
}

int cmd_duality(const ExperimentConfig& c, const Common& common, Run& run) {
    if (c.process != Process::McbInfinity) throw ConfigError("[run].process: duality tables need mcb_infinity");
    DualityParams p;
    p.sim.scheme = c.scheme == "tau_leap" ? Scheme::TauLeap : Scheme::HarmonicSplit;
    p.sim.h = c.h;
    if (c.delta) p.sim.window = TruncationWindow(*c.delta);
    p.t = c.duality_t;
    p.s = c.duality_s;
    p.replicas = c.replicas;
    p.seed = c.seed;
    p.workers = common.workers;
    std::vector<DualityMark> marks;
    for (const auto& [site, y] : c.marks) marks.push_back({site, y});
    if (marks.empty()) {
        marks.push_back({0, BoundaryPoint::type1(1.0)});
        if (c.n > 1) marks.push_back({c.n - 1, BoundaryPoint::type2(0.25)});
    }
    if (c.initial == InitialKind::Stationary)
        throw ConfigError("[initial].kind: duality tables need a deterministic start");
    Rng unused(0);
    const auto r = duality_residual(SystemState(initial_sites(c, unused)), marks, p);
    std::ofstream os;
    run.open("duality.csv", os);
    run.header(os, "duality");
    os << "quantity,re,im,se\n";
    auto row = [&](const char* name, const ComplexEstimate& e) {
        os << name << ',' << format_double(e.mean.real()) << ',' << format_double(e.mean.imag()) << ','
           << format_double(e.se) << '\n';
    };
    row("lhs", r.lhs);
    row("main", r.main);
    row("remainder", r.remainder);
    row("residual", r.residual);
    os << "remainder_bound," << format_double(r.remainder_bound) << ",0,0\n";
    os << "sup_mean_distance," << format_double(r.sup_mean_distance) << ",0,0\n";
    const bool ok = std::abs(r.residual.mean) <= 3.0 * r.residual.se;
    std::cout << "residual |" << format_double(std::abs(r.residual.mean)) << "| vs 3 SE "
              << format_double(3.0 * r.residual.se) << (ok ? " pass" : " FAIL") << "\n";
    return ok ? kExitPass : kExitFail;
}

int cmd_measures(const std::string& table, std::size_t samples, double delta, Run& run, bool plots) {
    std::ofstream os;
    const double inf = std::numeric_limits<double>::infinity();
    if (table == "nu-moments") {
        run.open("nu_moments.csv", os);
        run.header(os, "nu_moments");
        os << "x,axis1_second_moment,axis1_second_moment_restricted,axis2_second_moment";
        if (samples > 0) os << ",axis1_second_moment_sampled,axis2_second_moment_sampled";
        os << "\n";
        const std::vector<double> xs{0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0};
        // Restricted: the window (1 - delta, 1 + delta) removed, as sampled.
        auto restricted = [&](double x) {
            double v = nu_truncated_second_moment(Axis::Axis1, std::min(x, 1.0 - delta));
            if (x > 1.0 + delta)
                v += nu_truncated_second_moment(Axis::Axis1, x) - nu_truncated_second_moment(Axis::Axis1, 1.0 + delta);
            return v;
        };
        std::vector<Accumulator> a1(xs.size()), a2(xs.size());
        if (samples > 0) {
            const RestrictedNu nu{TruncationWindow(delta)};
            Rng rng(run.seed);
            for (std::size_t k = 0; k < samples; ++k) {
                const JumpMark m = nu.sample(rng);
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    const bool below = m.value < xs[i];
                    a1[i].add(m.axis == Axis::Axis1 && below ? (m.value - 1) * (m.value - 1) : 0.0);
                    a2[i].add(m.axis == Axis::Axis2 && below ? m.value * m.value : 0.0);
                }
            }
            const double total = nu.total_mass();
            for (std::size_t i = 0; i < xs.size(); ++i) {
                os << format_double(xs[i]) << ',' << format_double(nu_truncated_second_moment(Axis::Axis1, xs[i]))
                   << ',' << format_double(restricted(xs[i])) << ','
                   << format_double(nu_truncated_second_moment(Axis::Axis2, xs[i])) << ','
                   << format_double(total * a1[i].mean()) << ',' << format_double(total * a2[i].mean()) << '\n';
            }
        } else {
            for (double x : xs)
                os << format_double(x) << ',' << format_double(nu_truncated_second_moment(Axis::Axis1, x)) << ','
                   << format_double(restricted(x)) << ',' << format_double(nu_truncated_second_moment(Axis::Axis2, x))
                   << '\n';
        }
        os << "# axis2_mean=" << format_double(nu_mean_axis2())
           << " axis2_mean_quadrature=" << format_double(nu_mean_axis2_quadrature()) << "\n";
    } else if (table == "nu-masses") {
        run.open("nu_masses.csv", os);
        run.header(os, "nu_masses");
        os << "eps,axis1_complement_mass,axis2_tail_mass,axis1_above_mass,jump_tail_lhs,jump_tail_rhs\n";
        for (double e : {0.1, 0.5, 1.0, 2.0, 10.0}) {
            const BoundPair b = jump_tail_bound_check(e);
            os << format_double(e) << ',' << format_double(nu_axis1_complement_mass(e)) << ','
               << format_double(nu_axis2_tail_mass(e)) << ','
               << format_double(nu_interval_mass(Axis::Axis1, 1.0 + e, inf)) << ',' << format_double(b.lhs) << ','
               << format_double(b.rhs) << '\n';
        }
    } else if (table == "nu-density") {
        run.open("nu_density.csv", os);
        run.header(os, "nu_density");
        os << "y,axis1_density,axis2_density\n";
        for (int i = 1; i <= 60; ++i) {
            const double y = 0.05 * i;
            const double d1 = std::abs(y - 1.0) < 1e-12 ? inf : nu_density({Axis::Axis1, y});
            os << format_double(y) << ',' << format_double(d1) << ',' << format_double(nu_density({Axis::Axis2, y}))
               << '\n';
        }
    } else {
        throw ConfigError("--table: expected nu-moments, nu-masses or nu-density, got '" + table + "'");
    }
    os.close();
    if (plots) plots_from_dir(run.dir, &run);
    std::cout << "wrote " << (run.dir / run.artifacts.front()).string() << "\n";
    return kExitPass;
}

std::vector<int> parse_id_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        int id = 0;
        try {
            id = std::stoi(item, &used);
        } catch (...) {
            used = 0;
        }
        if (used != item.size() || id < 1 || id > kCriterionCount)
            throw ConfigError("--only: bad criterion id '" + item + "'");
        out.push_back(id);
    }
    return out;
}

int cmd_verify(const Common& common, const std::string& only, Run& run) {
    AcceptanceOptions o;
    o.seed = run.seed;
    o.workers = common.workers;
    o.criteria = only.empty() ? (common.quick ? quick_criteria() : std::vector<int>{}) : parse_id_list(only);
    std::string canon = "[verify]\ncriteria =";
    for (int id : o.criteria) canon += " " + std::to_string(id);
    run.hash = fnv1a_hex(canon + "\n");
    bool all = true;
    const auto results = run_acceptance(o, [&](const CriterionResult& r) {
        all = all && r.pass;
        std::cout << format_criterion_line(r) << "\n" << std::flush;
    });
    std::ofstream os;
    run.open("acceptance.csv", os);
    run.header(os, "acceptance");
    write_report_rows(os, results);
    std::cout << (all ? "all criteria pass" : "some criteria fail") << "\n";
    return all ? kExitPass : kExitFail;
}

int cmd_report(const std::string& from, const std::string& out) {
    const fs::path dir(from);
    if (!fs::is_directory(dir)) throw ConfigError("--from: '" + from + "' is not a directory");
    Run run;
    run.command = "report";
    run.dir = out.empty() ? dir : fs::path(out);
    std::vector<std::string> written;
    if (run.dir == dir) {
        written = plots_from_dir(dir, nullptr);
    } else {
        // Read from `from`, write into `out`.
        fs::create_directories(run.dir);
        for (const char* f : {"paths.csv", "reports.csv", "nu_moments.csv"})
            if (fs::exists(dir / f)) fs::copy_file(dir / f, run.dir / f, fs::copy_options::overwrite_existing);
        written = plots_from_dir(run.dir, nullptr);
    }
    if (written.empty()) {
        std::cerr << "report: no plottable CSV (paths.csv, reports.csv, nu_moments.csv) in " << from << "\n";
        return kExitFail;
    }
    for (const auto& w : written) std::cout << "wrote " << (run.dir / w).string() << "\n";
    return kExitPass;
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_path, "config file")->envname("MCBLAB_CONFIG");
    app->add_option("--seed", c.seed, "master seed (overrides [run].seed)")->envname("MCBLAB_SEED");
    app->add_option("--workers", c.workers, "worker threads; results do not depend on it")
        ->envname("MCBLAB_WORKERS")
        ->check(CLI::Range(1u, 1024u));
    app->add_option("--out", c.out, "output directory (overrides [output].dir)")->envname("MCBLAB_OUT");
    app->add_flag("--quick", c.quick, "verify: run the short subset")->envname("MCBLAB_QUICK");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mcblab: mutually catalytic branching experiments"};
    app.require_subcommand(1);
    Common common;
    std::string table = "nu-moments";
    std::size_t samples = 0;
    double delta = 0.5;
    std::string only;
    std::string from;

    auto* measures = app.add_subcommand("measures", "tabulate densities, masses and moments of nu as CSV");
    add_common(measures, common);
    measures->add_option("--table", table, "nu-moments | nu-masses | nu-density");
    measures->add_option("--samples", samples, "nu-moments: add sampled columns from this many draws");
    measures->add_option("--delta", delta, "truncation window for sampled columns")->check(CLI::Range(1e-12, 0.999));
    auto* simulate_cmd = app.add_subcommand("simulate", "run MCB(infinity) paths, or a suite from [suite].name");
    add_common(simulate_cmd, common);
    auto* reference_cmd = app.add_subcommand("reference", "run mcb_gamma, limit_diffusion or y_theta paths");
    add_common(reference_cmd, common);
    auto* duality_cmd = app.add_subcommand("duality", "duality residual table");
    add_common(duality_cmd, common);
    auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
    add_common(verify, common);
    verify->add_option("--only", only, "comma-separated criterion ids");
    auto* report = app.add_subcommand("report", "regenerate plots from stored CSV");
    add_common(report, common);
    report->add_option("--from", from, "directory with CSV artifacts")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitUsage;
    }
    common.seed_given = !app.get_subcommands().front()->get_option("--seed")->empty();

    Run run;
    run.command = app.get_subcommands().front()->get_name();
    try {
        if (report->parsed()) return cmd_report(from, common.out);

        ExperimentConfig config;
        if (!common.config_path.empty()) config = load_experiment_config(common.config_path);
        if (common.seed_given) config.seed = common.seed;
        run.dir = common.out.empty() ? fs::path(config.out_dir) : fs::path(common.out);
        run.hash = config_hash(config);
        run.seed = config.seed;

        if (measures->parsed()) {
            run.hash = fnv1a_hex("[measures]\ndelta = " + format_double(delta) + "\nsamples = " +
                                 std::to_string(samples) + "\ntable = " + table + "\n");
            return cmd_measures(table, samples, delta, run, config.plots);
        }
        if (verify->parsed()) return cmd_verify(common, only, run);
        if (simulate_cmd->parsed()) return cmd_simulate(config, common, run);
        if (reference_cmd->parsed()) return cmd_reference(config, common, run);
        if (duality_cmd->parsed()) return cmd_duality(config, common, run);
    } catch (const ConfigError& e) {
        std::cerr << "mcblab: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "mcblab: " << e.what() << "\n";
        write_manifest(run, e.what());
        std::cerr << "partial artifacts and error_manifest.txt in " << run.dir.string() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
