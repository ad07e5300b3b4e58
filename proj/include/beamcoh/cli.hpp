#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "beamcoh/beam_splitter.hpp"
#include "beamcoh/coherence.hpp"
#include "beamcoh/fock.hpp"
#include "beamcoh/optimizer.hpp"
#include "beamcoh/states.hpp"

namespace beamcoh::cli {

enum class Command { Sweep, Optimize, GainCurve, MaxVsPhotons, StateDump };
enum class MeasureSel { L1, Entropy, Both };

struct InputSpec {
    std::string kind;            // fock | tmsv | coherent
    std::vector<double> values;  // fock N1 N2 | tmsv XI | coherent A1 A2
};

struct ParamGrid {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 0;
};

struct RunConfig {
    Command command = Command::Sweep;
    InputSpec input;
    MeasureSel measure = MeasureSel::Both;
    int grid_points = 721;
    double epsilon = 1e-10;
    double theta = std::numbers::pi / 4.0;  // state-dump only
    std::optional<ParamGrid> param_grid;    // gain-curve only
    int max_total = 8;                      // max-vs-photons only
    std::string out_path;                   // empty -> stdout
    int threads = 0;
};

namespace impl {

inline const char* command_name(Command c) {
    switch (c) {
        case Command::Sweep: return "sweep";
        case Command::Optimize: return "optimize";
        case Command::GainCurve: return "gain-curve";
        case Command::MaxVsPhotons: return "max-vs-photons";
        case Command::StateDump: return "state-dump";
    }
    return "?";
}

inline const char* measure_name(MeasureSel m) {
    switch (m) {
        case MeasureSel::L1: return "l1";
        case MeasureSel::Entropy: return "entropy";
        case MeasureSel::Both: return "both";
    }
    return "?";
}

inline InputSpec parse_input(const std::vector<std::string>& raw) {
    if (raw.empty()) throw std::invalid_argument("--input requires a kind (fock|tmsv|coherent)");
    InputSpec spec;
    spec.kind = raw[0];
    if (spec.kind != "fock" && spec.kind != "tmsv" && spec.kind != "coherent")
        throw std::invalid_argument("unknown input kind '" + spec.kind +
                                    "' (expected fock, tmsv, or coherent)");
    for (std::size_t i = 1; i < raw.size(); ++i) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(raw[i], &pos);
        } catch (...) {
            throw std::invalid_argument("bad numeric value '" + raw[i] + "' in --input");
        }
        if (pos != raw[i].size())
            throw std::invalid_argument("bad numeric value '" + raw[i] + "' in --input");
        spec.values.push_back(v);
    }
    return spec;
}

inline int fock_photon_count(double v, const char* which) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e6)
        throw std::invalid_argument(std::string("fock ") + which +
                                    " must be a small nonnegative integer");
    return static_cast<int>(v);
}

inline SweepInput to_sweep_input(const InputSpec& in, double epsilon) {
    if (in.kind == "fock") {
        if (in.values.size() != 2) throw std::invalid_argument("fock input takes two values: N1 N2");
        return SweepInput{number_state(fock_photon_count(in.values[0], "N1"),
                                       fock_photon_count(in.values[1], "N2"))};
    }
    if (in.kind == "tmsv") {
        if (in.values.size() != 1) throw std::invalid_argument("tmsv input takes one value: XI");
        return SweepInput{TmsvParams{in.values[0], epsilon}};
    }
    if (in.values.size() != 2) throw std::invalid_argument("coherent input takes two values: A1 A2");
    return SweepInput{CoherentPair{cplx{in.values[0], 0.0}, cplx{in.values[1], 0.0}}};
}

inline TwoModeState to_state(const InputSpec& in, double epsilon) {
    const SweepInput input = to_sweep_input(in, epsilon);
    if (std::holds_alternative<TwoModeState>(input)) return std::get<TwoModeState>(input);
    if (std::holds_alternative<TmsvParams>(input)) return tmsv_state(std::get<TmsvParams>(input));
    return coherent_to_fock(std::get<CoherentPair>(input), epsilon);
}

inline std::vector<Measure> selected_measures(MeasureSel sel) {
    switch (sel) {
        case MeasureSel::L1: return {Measure::L1};
        case MeasureSel::Entropy: return {Measure::RelativeEntropy};
        case MeasureSel::Both: return {Measure::L1, Measure::RelativeEntropy};
    }
    return {};
}

inline std::string input_token(const InputSpec& in, bool kind_only) {
    std::string t = in.kind;
    if (!kind_only)
        for (double v : in.values) t += ":" + detail::fmt_g12(v);
    return t;
}

/// `#`-comment recording the resolved configuration.  Only fields that feed
/// the computation appear, so outputs stay byte-identical across output
/// paths and thread counts.
inline std::string config_comment(const RunConfig& cfg) {
    std::ostringstream os;
    os << "# beamcoh " << command_name(cfg.command)
       << " input=" << input_token(cfg.input, cfg.command == Command::GainCurve);
    if (cfg.command == Command::GainCurve || cfg.command == Command::MaxVsPhotons) {
        const MeasureSel resolved =
            cfg.measure == MeasureSel::Both ? MeasureSel::L1 : cfg.measure;
        os << " measure=" << measure_name(resolved);
    } else if (cfg.command != Command::StateDump) {
        os << " measure=" << measure_name(cfg.measure);
    }
    if (cfg.command != Command::StateDump) os << " grid=" << cfg.grid_points;
    os << " epsilon=" << detail::fmt_g12(cfg.epsilon);
    if (cfg.command == Command::StateDump) os << " theta=" << detail::fmt_g12(cfg.theta);
    if (cfg.command == Command::GainCurve && cfg.param_grid) {
        os << " param-grid=" << detail::fmt_g12(cfg.param_grid->lo) << ':'
           << detail::fmt_g12(cfg.param_grid->hi) << ':' << cfg.param_grid->steps;
    }
    if (cfg.command == Command::MaxVsPhotons) os << " max-total=" << cfg.max_total;
    return os.str();
}

struct OutputPayload {
    std::string csv;
    std::optional<std::string> sidecar;
};

inline SweepOptions sweep_options(const RunConfig& cfg) {
    SweepOptions opts;
    opts.grid_points = cfg.grid_points;
    opts.epsilon = cfg.epsilon;
    opts.threads = cfg.threads;
    return opts;
}

inline const char* measure_tag(Measure m) { return m == Measure::L1 ? "l1" : "entropy"; }

inline void add_optimum_scalars(nlohmann::json& j, const SweepResult& res) {
    const std::string tag = measure_tag(res.measure);
    j["best_theta_" + tag] = res.best_theta;
    j["best_value_" + tag] = res.best_value;
    j["min_value_" + tag] = res.min_value;
    j["truncation_bound_" + tag] = res.truncation_bound;
}

inline void add_subspace_scalars(nlohmann::json& j, const RunConfig& cfg) {
    if (cfg.input.kind != "fock") return;
    const int total = static_cast<int>(cfg.input.values[0] + cfg.input.values[1]);
    j["subspace_max_l1"] = max_l1_in_subspace(total);
    j["subspace_max_entropy"] = max_entropy_in_subspace(total);
}

inline OutputPayload run_sweep_like(const RunConfig& cfg) {
    const SweepInput input = to_sweep_input(cfg.input, cfg.epsilon);
    const auto measures = selected_measures(cfg.measure);
    std::vector<SweepResult> results;
    results.reserve(measures.size());
    for (Measure m : measures) results.push_back(sweep(input, m, sweep_options(cfg)));

    std::ostringstream csv;
    csv << config_comment(cfg) << '\n';
    if (cfg.command == Command::Sweep) {
        csv << "theta";
        for (const auto& res : results) csv << ",c_" << measure_tag(res.measure);
        csv << '\n';
        for (std::size_t i = 0; i < results.front().thetas.size(); ++i) {
            csv << detail::fmt_g12(results.front().thetas[i]);
            for (const auto& res : results) csv << ',' << detail::fmt_g12(res.values[i]);
            csv << '\n';
        }
    } else {
        csv << "measure,best_theta,best_value,min_value\n";
        for (const auto& res : results) {
            csv << measure_tag(res.measure) << ',' << detail::fmt_g12(res.best_theta) << ','
                << detail::fmt_g12(res.best_value) << ',' << detail::fmt_g12(res.min_value)
                << '\n';
        }
    }

    nlohmann::json j;
    for (const auto& res : results) add_optimum_scalars(j, res);
    add_subspace_scalars(j, cfg);
    j["grid_points"] = cfg.grid_points;
    j["epsilon"] = cfg.epsilon;
    return OutputPayload{csv.str(), j.dump(2) + "\n"};
}

inline OutputPayload run_gain_curve(const RunConfig& cfg) {
    if (cfg.input.kind != "tmsv" && cfg.input.kind != "coherent")
        throw std::invalid_argument("gain-curve supports tmsv or coherent inputs");
    if (!cfg.param_grid) throw std::invalid_argument("gain-curve requires --param-grid lo:hi:steps");
    const ParamGrid& g = *cfg.param_grid;
    if (g.steps < 1 || !(g.hi >= g.lo)) throw std::invalid_argument("bad --param-grid range");

    std::vector<double> params;
    for (int i = 0; i < g.steps; ++i) {
        params.push_back(g.steps == 1 ? g.lo
                                      : g.lo + (g.hi - g.lo) * (static_cast<double>(i) / (g.steps - 1)));
    }
    for (double p : params) {
        if (cfg.input.kind == "tmsv" && !(p >= 0.0 && p < 1.0))
            throw std::domain_error("gain-curve: squeezing parameter must lie in [0,1)");
        if (cfg.input.kind == "coherent" && !(p >= 0.0))
            throw std::domain_error("gain-curve: mean photon number must be nonnegative");
    }
    const Measure measure =
        cfg.measure == MeasureSel::Entropy ? Measure::RelativeEntropy : Measure::L1;

    std::ostringstream csv;
    csv << config_comment(cfg) << '\n';
    csv << "param,gain_percent,c_max,c_min\n";
    for (double p : params) {
        const GainReport rep =
            cfg.input.kind == "tmsv"
                ? gain(TmsvParams{p, cfg.epsilon}, measure, sweep_options(cfg))
                : gain(CoherentPair{cplx{std::sqrt(p), 0.0}, cplx{0.0, 0.0}}, measure,
                       sweep_options(cfg));
        csv << detail::fmt_g12(p) << ',' << detail::fmt_g12(rep.gain_percent) << ','
            << detail::fmt_g12(rep.c_max) << ',' << detail::fmt_g12(rep.c_min) << '\n';
    }
    return OutputPayload{csv.str(), std::nullopt};
}

inline OutputPayload run_max_vs_photons(const RunConfig& cfg) {
    const Measure measure =
        cfg.measure == MeasureSel::Entropy ? Measure::RelativeEntropy : Measure::L1;
    const auto rows = max_coherence_vs_photons(cfg.max_total, measure, sweep_options(cfg));
    std::ostringstream csv;
    csv << config_comment(cfg) << '\n';
    csv << "n_total,achieved,bound,best_split_n1,best_theta\n";
    for (const auto& row : rows) {
        csv << row.n_total << ',' << detail::fmt_g12(row.achieved) << ','
            << detail::fmt_g12(row.bound) << ',' << row.best_split_n1 << ','
            << detail::fmt_g12(row.best_theta) << '\n';
    }
    return OutputPayload{csv.str(), std::nullopt};
}

inline OutputPayload run_state_dump(const RunConfig& cfg) {
    const TwoModeState state = to_state(cfg.input, cfg.epsilon);
    const TwoModeState out = apply(make_beam_splitter(cfg.theta), state);
    std::ostringstream csv;
    csv << config_comment(cfg) << '\n';
    write_state_csv(out, csv);
    return OutputPayload{csv.str(), std::nullopt};
}

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        f << content;
        f.flush();
        if (!f) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("failed writing '" + tmp.string() + "'");
        }
    }
    fs::rename(tmp, path);
}

inline void emit(const RunConfig& cfg, const OutputPayload& payload) {
    if (cfg.out_path.empty()) {
        std::cout << payload.csv;
        return;
    }
    const std::filesystem::path csv_path(cfg.out_path);
    write_atomic(csv_path, payload.csv);
    if (payload.sidecar) {
        std::filesystem::path sidecar_path = csv_path;
        sidecar_path.replace_extension(".json");
        if (sidecar_path == csv_path) sidecar_path += ".json";
        write_atomic(sidecar_path, *payload.sidecar);
    }
}

}  // namespace impl

/// Parse and execute one CLI invocation (arguments exclude the program
/// name).  Returns the process exit code; 0 on success, 1 with a one-line
/// stderr diagnostic on any usage or domain error.  No partial output files
/// are left behind on failure.
inline int run_cli(const std::vector<std::string>& args) {
    RunConfig cfg;
    std::vector<std::string> raw_input;
    std::string measure_str = "both";
    std::string param_grid_str;

    CLI::App app{"Fock-space coherence of beam-splitter outputs"};
    app.require_subcommand(1);

    struct SubSpec {
        Command command;
        const char* name;
        const char* help;
        CLI::App* sub = nullptr;
    };
    SubSpec subs[] = {
        {Command::Sweep, "sweep", "Coherence vs theta as a CSV series", nullptr},
        {Command::Optimize, "optimize", "Refined optimum summary only", nullptr},
        {Command::GainCurve, "gain-curve", "Coherence gain over a parameter grid", nullptr},
        {Command::MaxVsPhotons, "max-vs-photons",
         "Best coherence per total photon number vs the subspace bound", nullptr},
        {Command::StateDump, "state-dump", "Beam-splitter output state amplitudes", nullptr},
    };
    for (auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--input", raw_input,
                        "Input spec: fock N1 N2 | tmsv XI | coherent A1 A2")
            ->required()
            ->expected(1, 3);
        sub->add_option("--measure", measure_str, "l1 | entropy | both")
            ->check(CLI::IsMember({"l1", "entropy", "both"}));
        sub->add_option("--grid", cfg.grid_points, "Theta grid points")->check(CLI::PositiveNumber);
        sub->add_option("--epsilon", cfg.epsilon, "Truncation tail target");
        sub->add_option("--threads", cfg.threads, "Worker threads (0 = auto)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--out", cfg.out_path, "Output CSV path (default: stdout)");
        if (s.command == Command::StateDump)
            sub->add_option("--theta", cfg.theta, "Beam-splitter angle");
        if (s.command == Command::GainCurve)
            sub->add_option("--param-grid", param_grid_str, "lo:hi:steps");
        if (s.command == Command::MaxVsPhotons)
            sub->add_option("--max-total", cfg.max_total, "Largest total photon number")
                ->check(CLI::PositiveNumber);
        s.sub = sub;
    }

    std::vector<const char*> argv;
    argv.push_back("beamcoh");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "beamcoh: error: " << e.what() << '\n';
        return 1;
    }

    try {
        for (const auto& s : subs)
            if (s.sub->parsed()) cfg.command = s.command;
        cfg.input = impl::parse_input(raw_input);
        if (measure_str == "l1") cfg.measure = MeasureSel::L1;
        else if (measure_str == "entropy") cfg.measure = MeasureSel::Entropy;
        else cfg.measure = MeasureSel::Both;
        if (!param_grid_str.empty()) {
            ParamGrid g;
            if (std::sscanf(param_grid_str.c_str(), "%lf:%lf:%d", &g.lo, &g.hi, &g.steps) != 3)
                throw std::invalid_argument("--param-grid expects lo:hi:steps");
            cfg.param_grid = g;
        }
        if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
            throw std::domain_error("--epsilon must lie in (0,1)");

        impl::OutputPayload payload;
        switch (cfg.command) {
            case Command::Sweep:
            case Command::Optimize:
                payload = impl::run_sweep_like(cfg);
                break;
            case Command::GainCurve:
                payload = impl::run_gain_curve(cfg);
                break;
            case Command::MaxVsPhotons:
                payload = impl::run_max_vs_photons(cfg);
                break;
            case Command::StateDump:
                payload = impl::run_state_dump(cfg);
                break;
        }
        impl::emit(cfg, payload);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "beamcoh: error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace beamcoh::cli
