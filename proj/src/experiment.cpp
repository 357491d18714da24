#include "breakopt/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

#include "breakopt/analytic.hpp"
#include "breakopt/bvp.hpp"
#include "breakopt/transcription.hpp"

namespace breakopt {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& value, const std::string& key, std::size_t line) {
    const std::string v = trim(value);
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("line " + std::to_string(line) + ": non-numeric value for key '" + key +
                          "': '" + v + "'");
    }
    return out;
}

const std::vector<std::string> kSweepKeys = {"sweep_param", "sweep_from", "sweep_to",
                                             "sweep_step"};

ModelInstance model_from_map(const std::map<std::string, double>& kv) {
    ModelInstance m;
    m.demand = {kv.at("d1"), kv.at("d2"), kv.at("d3")};
    m.holding = {kv.at("a"), kv.at("b"), kv.at("n")};
    m.breakage = {kv.at("b1"), kv.at("gamma")};
    m.econ.c10 = kv.at("c10");
    m.econ.L = kv.at("L");
    m.econ.N = kv.at("N");
    m.econ.beta10 = kv.at("beta10");
    m.econ.s1 = kv.at("s1");
    m.econ.s2 = kv.at("s2");
    m.econ.p = kv.at("p");
    m.T = kv.at("T");
    return m;
}

void format_fixed(std::ostream& os, double v) {
    os << std::fixed << std::setprecision(6) << v;
}

std::string to_string_fixed(double v) {
    std::ostringstream os;
    format_fixed(os, v);
    return os.str();
}

SolveOutcome finish_outcome(SolveOutcome outcome, const ModelInstance& model) {
    outcome.max_dynamics_residual = dynamics_residual(model, outcome.trajectory);
    outcome.residual_bound = dynamics_residual_bound(outcome.trajectory);
    return outcome;
}

}  // namespace

std::string solver_name(SolverKind kind) {
    switch (kind) {
        case SolverKind::Analytic1a: return "analytic-1a";
        case SolverKind::Analytic1b: return "analytic-1b";
        case SolverKind::Bvp: return "bvp";
        case SolverKind::Transcription: return "transcription";
    }
    return "unknown";
}

SolverKind solver_from_name(const std::string& name) {
    if (name == "analytic-1a") return SolverKind::Analytic1a;
    if (name == "analytic-1b") return SolverKind::Analytic1b;
    if (name == "bvp") return SolverKind::Bvp;
    if (name == "transcription") return SolverKind::Transcription;
    throw ConfigError("unknown solver '" + name +
                      "' (expected analytic-1a, analytic-1b, bvp or transcription)");
}

const std::vector<std::string>& model_keys() {
    static const std::vector<std::string> keys = {"L",  "N",  "c10", "beta10", "p",  "s1",
                                                  "s2", "a",  "b",   "n",      "d1", "d2",
                                                  "d3", "T",  "b1",  "gamma"};
    return keys;
}

RunConfig parse_config(const std::string& text) {
    std::map<std::string, double> values;
    std::string sweep_param;
    bool saw_sweep_param = false;

    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value, got '" +
                              line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }

        const bool is_model = std::find(model_keys().begin(), model_keys().end(), key) !=
                              model_keys().end();
        const bool is_sweep = std::find(kSweepKeys.begin(), kSweepKeys.end(), key) !=
                              kSweepKeys.end();
        if (!is_model && !is_sweep) {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key: " + key);
        }
        if (key == "sweep_param") {
            if (saw_sweep_param) {
                throw ConfigError("line " + std::to_string(lineno) + ": duplicate key: " + key);
            }
            sweep_param = value;
            saw_sweep_param = true;
            continue;
        }
        if (values.count(key)) {
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key: " + key);
        }
        values[key] = parse_number(value, key, lineno);
    }

    for (const std::string& key : model_keys()) {
        if (!values.count(key)) throw ConfigError("missing key: " + key);
    }

    RunConfig config;
    config.model = model_from_map(values);
    try {
        config.model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid model: ") + e.what());
    }

    const bool any_sweep = saw_sweep_param || values.count("sweep_from") ||
                           values.count("sweep_to") || values.count("sweep_step");
    if (any_sweep) {
        if (!saw_sweep_param || !values.count("sweep_from") || !values.count("sweep_to") ||
            !values.count("sweep_step")) {
            throw ConfigError(
                "sweep block requires all of sweep_param, sweep_from, sweep_to, sweep_step");
        }
        SweepSpec sweep;
        sweep.param = sweep_param;
        sweep.from = values.at("sweep_from");
        sweep.to = values.at("sweep_to");
        sweep.step = values.at("sweep_step");
        if (std::find(model_keys().begin(), model_keys().end(), sweep.param) ==
            model_keys().end()) {
            throw ConfigError("sweep_param must name a model key, got '" + sweep.param + "'");
        }
        if (sweep.step <= 0.0) throw ConfigError("sweep_step must be positive");
        if (sweep.from > sweep.to) throw ConfigError("sweep_from must not exceed sweep_to");
        config.sweep = sweep;
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

ModelInstance with_param(const ModelInstance& model, const std::string& key, double value) {
    ModelInstance m = model;
    if (key == "L") m.econ.L = value;
    else if (key == "N") m.econ.N = value;
    else if (key == "c10") m.econ.c10 = value;
    else if (key == "beta10") m.econ.beta10 = value;
    else if (key == "p") m.econ.p = value;
    else if (key == "s1") m.econ.s1 = value;
    else if (key == "s2") m.econ.s2 = value;
    else if (key == "a") m.holding.a = value;
    else if (key == "b") m.holding.b = value;
    else if (key == "n") m.holding.n = value;
    else if (key == "d1") m.demand.d1 = value;
    else if (key == "d2") m.demand.d2 = value;
    else if (key == "d3") m.demand.d3 = value;
    else if (key == "T") m.T = value;
    else if (key == "b1") m.breakage.b1 = value;
    else if (key == "gamma") m.breakage.gamma = value;
    else throw ConfigError("unknown model key: " + key);
    m.validate();
    return m;
}

SolveOutcome run_solver(const ModelInstance& model, SolverKind kind, std::size_t intervals) {
    model.validate();
    SolveOutcome outcome;
    outcome.solver = kind;

    switch (kind) {
        case SolverKind::Analytic1a: {
            const Model1aCoefficients c = coefficients_1a(model);
            outcome.trajectory = sample_1a(c, model, intervals);
            outcome.profit = profit_1a(c, model);
            outcome.converged = true;
            outcome.feasible = outcome.trajectory.is_feasible();
            break;
        }
        case SolverKind::Analytic1b: {
            const Model1bCoefficients c = coefficients_1b(model);
            outcome.trajectory = sample_1b(c, model, intervals);
            outcome.profit = profit_1b(c, model);
            outcome.converged = true;
            outcome.feasible = outcome.trajectory.is_feasible();
            break;
        }
        case SolverKind::Bvp: {
            const BvpSolution sol = solve_bvp(model, GridSpec{intervals, model.T});
            outcome.trajectory = sol.trajectory;
            outcome.profit = profit_of_trajectory(model, sol.trajectory);
            outcome.converged = sol.converged;
            outcome.feasible = sol.feasible;
            outcome.diagnostics.emplace_back("iterations", std::to_string(sol.iterations));
            outcome.diagnostics.emplace_back("final_residual",
                                             std::to_string(sol.final_residual));
            outcome.diagnostics.emplace_back("regularization_active",
                                             sol.regularization_active ? "true" : "false");
            break;
        }
        case SolverKind::Transcription: {
            TranscriptionSettings settings;
            settings.intervals = intervals;
            const OptimizationReport report = optimize(model, settings);
            outcome.trajectory = report.trajectory;
            outcome.profit = report.profit;
            outcome.converged = report.converged;
            outcome.feasible = report.feasible;
            outcome.diagnostics.emplace_back("iterations", std::to_string(report.iterations));
            outcome.diagnostics.emplace_back("terminal_violation",
                                             std::to_string(report.terminal_violation));
            outcome.diagnostics.emplace_back("projected_gradient_norm",
                                             std::to_string(report.projected_gradient_norm));
            outcome.diagnostics.emplace_back("initial_gradient_norm",
                                             std::to_string(report.initial_gradient_norm));
            break;
        }
    }
    return finish_outcome(std::move(outcome), model);
}

std::vector<SweepPoint> run_sweep(const ModelInstance& model, const SweepSpec& sweep,
                                  SolverKind kind, std::size_t intervals) {
    std::vector<double> values;
    // Half-step slack absorbs accumulated rounding in the range endpoints.
    for (double v = sweep.from; v <= sweep.to + 0.5 * sweep.step; v += sweep.step) {
        values.push_back(v);
        if (sweep.from == sweep.to) break;
    }

    std::vector<std::future<SweepPoint>> futures;
    futures.reserve(values.size());
    for (double v : values) {
        futures.push_back(std::async(std::launch::async, [&, v] {
            SweepPoint point;
            point.value = v;
            const SolveOutcome outcome = run_solver(with_param(model, sweep.param, v), kind,
                                                    intervals);
            point.profit = outcome.profit;
            point.ok = outcome.ok();
            return point;
        }));
    }
    std::vector<SweepPoint> points;
    points.reserve(futures.size());
    for (auto& f : futures) points.push_back(f.get());
    return points;
}

CompareResult run_compare(const ModelInstance& model_a, const ModelInstance& model_b,
                          SolverKind kind, std::size_t intervals) {
    if (std::abs(model_a.T - model_b.T) > 1e-12 * std::max(1.0, model_a.T)) {
        throw ConfigError("compare requires both configs to share T");
    }
    CompareResult result;
    result.outcome_a = run_solver(model_a, kind, intervals);
    result.outcome_b = run_solver(model_b, kind, intervals);

    const std::vector<double> times = report_times(model_a.T);
    const Trajectory a = trajectory_at_times(result.outcome_a.trajectory, times);
    const Trajectory b = trajectory_at_times(result.outcome_b.trajectory, times);
    result.rows.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        result.rows[i] = {times[i], a.x[i], b.x[i], a.u[i], b.u[i]};
    }
    return result;
}

std::vector<double> report_times(double T) {
    std::vector<double> times;
    for (double t = 0.0; t <= T + 1e-9; t += 1.0) times.push_back(std::min(t, T));
    if (times.back() < T - 1e-9) times.push_back(T);
    return times;
}

Trajectory trajectory_at_times(const Trajectory& traj, const std::vector<double>& times) {
    traj.validate_grid();
    Trajectory out;
    out.times = times;
    out.x.resize(times.size());
    out.u.resize(times.size());
    out.d.resize(times.size());

    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        const auto upper = std::upper_bound(traj.times.begin(), traj.times.end(), t);
        std::size_t j = upper == traj.times.begin()
                            ? 0
                            : static_cast<std::size_t>(upper - traj.times.begin()) - 1;
        if (j + 1 >= traj.size()) j = traj.size() - 2;
        const double t0 = traj.times[j], t1 = traj.times[j + 1];
        double w = (t - t0) / (t1 - t0);
        if (std::abs(t - t0) <= 1e-9) w = 0.0;
        if (std::abs(t - t1) <= 1e-9) w = 1.0;
        out.x[k] = (1.0 - w) * traj.x[j] + w * traj.x[j + 1];
        out.u[k] = (1.0 - w) * traj.u[j] + w * traj.u[j + 1];
        out.d[k] = (1.0 - w) * traj.d[j] + w * traj.d[j + 1];
    }
    return out;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,u,x,d\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        format_fixed(out, traj.times[i]);
        out << ',';
        format_fixed(out, traj.u[i]);
        out << ',';
        format_fixed(out, traj.x[i]);
        out << ',';
        format_fixed(out, traj.d[i]);
        out << '\n';
    }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || trim(line) != "t,u,x,d") {
        throw std::runtime_error(path.string() + ": expected header 't,u,x,d'");
    }
    Trajectory traj;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double v[4];
        for (int c = 0; c < 4; ++c) {
            if (!std::getline(row, cell, ',')) {
                throw std::runtime_error(path.string() + ": line " + std::to_string(lineno) +
                                         ": expected 4 columns");
            }
            v[c] = parse_number(cell, "t,u,x,d", lineno);
        }
        traj.times.push_back(v[0]);
        traj.u.push_back(v[1]);
        traj.x.push_back(v[2]);
        traj.d.push_back(v[3]);
    }
    traj.validate_grid();
    return traj;
}

void write_summary_csv(const std::filesystem::path& path, const SolveOutcome& outcome) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "key,value\n";
    out << "profit," << to_string_fixed(outcome.profit) << '\n';
    out << "solver," << solver_name(outcome.solver) << '\n';
    out << "converged," << (outcome.converged ? "true" : "false") << '\n';
    out << "feasible," << (outcome.feasible ? "true" : "false") << '\n';
    out << "max_dynamics_residual," << outcome.max_dynamics_residual << '\n';
    out << "dynamics_residual_bound," << outcome.residual_bound << '\n';
    for (const auto& [key, value] : outcome.diagnostics) {
        out << key << ',' << value << '\n';
    }
}

void write_sweep_csv(const std::filesystem::path& path, const std::string& param,
                     const std::vector<SweepPoint>& points) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << param << ",profit\n";
    for (const SweepPoint& point : points) {
        format_fixed(out, point.value);
        out << ',' << to_string_fixed(point.profit) << '\n';
    }
}

void write_compare_csv(const std::filesystem::path& path, const std::vector<CompareRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,x_A,x_B,u_A,u_B\n";
    for (const CompareRow& row : rows) {
        format_fixed(out, row.t);
        out << ',';
        format_fixed(out, row.x_a);
        out << ',';
        format_fixed(out, row.x_b);
        out << ',';
        format_fixed(out, row.u_a);
        out << ',';
        format_fixed(out, row.u_b);
        out << '\n';
    }
}

ModelInstance table1_model(double b1) {
    ModelInstance m;
    m.demand = {7.0, 4.0, 2.0};
    m.holding = {3.0, 0.2, 1.0};
    m.breakage = {b1, 1.0};
    m.econ.L = 40.0;
    m.econ.N = 60.0;
    m.econ.c10 = 0.7;
    m.econ.beta10 = 0.5;
    m.econ.p = 200.0;
    m.econ.s1 = 10.0;
    m.econ.s2 = 3.0;
    m.T = 12.0;
    return m;
}

}  // namespace breakopt
