// Command-line front end for Volterra-Laguerre identification.
//
// Every subcommand exits 0 on success. Failures print a single line
//     error: <ErrorClass>: <message>
// to stderr and exit 1 (2 for command-line usage errors).

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vl/experiment.hpp"
#include "vl/io.hpp"
#include "vl/laguerre.hpp"
#include "vl/model.hpp"
#include "vl/regressor.hpp"
#include "vl/rng.hpp"
#include "vl/simulate.hpp"
#include "vl/tuner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Window {
    std::optional<Eigen::Index> start;
    std::optional<Eigen::Index> rows;

    void add_options(CLI::App* cmd) {
        cmd->add_option("--start", start, "First row (sample index); defaults to the memory length");
        cmd->add_option("--rows", rows, "Number of rows; defaults to every remaining sample");
    }

    std::pair<Eigen::Index, Eigen::Index> resolve(const vl::Dataset& data, int memory) const {
        const Eigen::Index k = start.value_or(memory);
        return {k, rows.value_or(vl::feasible_rows(data, k))};
    }
};

std::uint64_t echo_seed(const std::optional<std::uint64_t>& seed) {
    if (!seed) std::cerr << "seed=0 (default)\n";
    return seed.value_or(0);
}

/// Applies first differencing to the named columns. Every column loses its
/// first sample so rows stay aligned.
std::vector<vl::io::DifferencedColumn> difference_columns(vl::io::CsvTable& table,
                                                          const std::vector<std::string>& names) {
    std::vector<vl::io::DifferencedColumn> out;
    if (names.empty()) return out;
    for (const auto& name : names) table.column(name);
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        auto& col = table.columns[c];
        if (std::find(names.begin(), names.end(), table.header[c]) != names.end()) {
            out.push_back({table.header[c], col(0)});
            col = vl::difference_transform(col);
        } else {
            if (col.size() < 2) throw vl::RangeError("differencing needs at least 2 samples");
            col = col.tail(col.size() - 1).eval();
        }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.column < b.column; });
    return out;
}

std::vector<std::string> differenced_names(const std::vector<vl::io::DifferencedColumn>& d) {
    std::vector<std::string> names;
    for (const auto& entry : d) names.push_back(entry.column);
    return names;
}

int run_laguerre(int order, double time_scale, int memory, double dt, const std::string& out) {
    vl::LaguerreSeriesSpec spec{order, time_scale};
    spec.validate();
    if (memory < 0) throw vl::InvalidParameter("memory must be >= 0");
    if (!(dt > 0.0)) throw vl::InvalidParameter("--dt must be > 0");
    const auto steps = static_cast<Eigen::Index>(std::llround(memory / dt));
    std::vector<std::string> header{"t"};
    std::vector<Eigen::VectorXd> columns(order + 1, Eigen::VectorXd(steps + 1));
    for (int r = 0; r < order; ++r) header.push_back("l" + std::to_string(r));
    for (Eigen::Index j = 0; j <= steps; ++j) {
        const double t = static_cast<double>(j) * dt;
        const auto values = vl::eval_laguerre_all<double>(order, t, time_scale);
        columns[0](j) = t;
        for (int r = 0; r < order; ++r) columns[r + 1](j) = values(r);
    }
    const auto csv = vl::io::format_csv(header, columns);
    if (out.empty()) std::cout << csv;
    else vl::io::write_file_atomic(out, csv);
    return 0;
}

int run_count(const std::string& structure_path) {
    const auto s = vl::io::load_structure(structure_path);
    int max_order = 0;
    for (const auto& per_input : s.specs)
        for (const auto& spec : per_input) max_order = std::max(max_order, spec.order_count);
    const int degree = s.max_degree();
    std::cout << "vl_coefficients=" << vl::coefficient_count(s) << "\n";
    std::cout << "vl_params_table=" << vl::vl_param_count_paper(degree, max_order)
              << "  # R^N with N=" << degree << ", R=" << max_order << "\n";
    if (s.memory_length >= 1) {
        std::cout << "volterra_params_exact=" << vl::volterra_param_count(degree, s.memory_length)
                  << "  # per input, N=" << degree << ", M=" << s.memory_length << "\n";
        std::cout << "volterra_params_approx="
                  << vl::volterra_param_count_approx(degree, s.memory_length) << "\n";
    }
    return 0;
}

struct FitArgs {
    std::string data, structure, out;
    double ridge = -1.0;
    Window window;
    std::vector<std::string> difference;
    bool strict = false;
};

int run_fit(const FitArgs& a) {
    const auto structure = vl::io::load_structure(a.structure, a.strict);
    auto table = vl::io::read_csv(a.data);
    vl::io::ModelFile file;
    file.differenced = difference_columns(table, a.difference);
    const auto data = vl::io::dataset_from_table(table, structure.input_names, structure.output_name);
    const auto [start, rows] = a.window.resolve(data, structure.memory_length);
    const double ridge = a.ridge >= 0.0 ? a.ridge : structure.ridge;
    file.model = vl::fit(data, structure, start, rows, ridge);
    file.fit_start = start;
    file.fit_rows = rows;
    vl::io::save_model(a.out, file);
    if (file.model.fit_stats.underdetermined)
        std::cerr << "warning: fewer rows than coefficients; minimum-norm solution reported\n";
    return 0;
}

struct PredictArgs {
    std::string model, data, out;
    Window window;
};

int run_predict(const PredictArgs& a) {
    const auto file = vl::io::load_model(a.model);
    const auto& s = file.model.structure;
    auto table = vl::io::read_csv(a.data);
    const bool has_output = table.has_column(s.output_name);
    const Eigen::VectorXd raw_output = has_output ? table.column(s.output_name) : Eigen::VectorXd();
    difference_columns(table, differenced_names(file.differenced));
    const auto data = vl::io::dataset_from_table(table, s.input_names, has_output ? s.output_name : "");
    const auto [start, rows] = a.window.resolve(data, s.memory_length);
    const Eigen::VectorXd y_hat = vl::predict(file.model, data, start, rows);

    const Eigen::Index shift = file.differenced.empty() ? 0 : 1;
    Eigen::VectorXd t(rows);
    for (Eigen::Index d = 0; d < rows; ++d) t(d) = static_cast<double>(start + d + shift);
    std::vector<std::string> header{"t", "y_hat"};
    std::vector<Eigen::VectorXd> columns{t, y_hat};

    const auto output_diff = std::find_if(file.differenced.begin(), file.differenced.end(),
                                          [&](const auto& d) { return d.column == s.output_name; });
    if (output_diff != file.differenced.end()) {
        // Free-run level: cumulate predicted differences from the level just
        // before the first predicted sample (observed if available, else the
        // stored training initial value).
        const double initial = has_output ? raw_output(start) : output_diff->initial;
        header.push_back("y_hat_level");
        columns.push_back(vl::inverse_cumulate(initial, y_hat).tail(rows));
    }
    vl::io::write_file_atomic(a.out, vl::io::format_csv(header, columns));
    return 0;
}

struct TuneArgs {
    std::string data, structure, out, trace;
    std::string bounds = "0.005,100";
    int starts = 8;
    int budget = 2000;
    std::optional<std::uint64_t> seed;
    double val_split = 0.0;
    double ridge = -1.0;
    Window window;
};

int run_tune(const TuneArgs& a) {
    const auto structure = vl::io::load_structure(a.structure);
    const auto data = vl::io::load_csv(a.data, structure.input_names, structure.output_name);
    vl::TuneConfig config;
    const auto comma = a.bounds.find(',');
    if (comma == std::string::npos) throw vl::ConfigError("--bounds expects LOW,HIGH");
    try {
        config.a_min = std::stod(a.bounds.substr(0, comma));
        config.a_max = std::stod(a.bounds.substr(comma + 1));
    } catch (const std::exception&) {
        throw vl::ConfigError("--bounds expects two numbers, got '" + a.bounds + "'");
    }
    config.multistart_count = a.starts;
    config.max_evaluations = a.budget;
    config.seed = echo_seed(a.seed);
    config.validation_split = a.val_split;
    config.ridge = a.ridge >= 0.0 ? a.ridge : structure.ridge;
    const auto [start, rows] = a.window.resolve(data, structure.memory_length);
    const auto result = vl::tune_time_scales(data, structure, config, start, rows);
    vl::io::save_structure(a.out, result.structure);

    std::vector<std::string> header{"start", "iter"};
    for (int i = 0; i < structure.num_inputs(); ++i)
        for (int n = 1; n <= structure.degrees[i]; ++n)
            header.push_back("a_" + structure.input_names[i] + "_" + std::to_string(n));
    header.push_back("sse");
    std::string csv;
    for (std::size_t c = 0; c < header.size(); ++c) csv += (c ? "," : "") + header[c];
    csv += "\n";
    for (const auto& entry : result.trace) {
        csv += std::to_string(entry.start) + "," + std::to_string(entry.iteration);
        for (double v : entry.time_scales) csv += "," + vl::io::format_double(v);
        csv += "," + vl::io::format_double(entry.sse) + "\n";
    }
    const std::string trace = a.trace.empty() ? a.out + ".trace.csv" : a.trace;
    vl::io::write_file_atomic(trace, csv);
    std::cerr << "best_sse=" << vl::io::format_double(result.best_sse)
              << " evaluations=" << result.evaluations << "\n";
    return 0;
}

int run_simulate(const std::string& plant_path, const std::string& inputs_path,
                 const std::optional<std::uint64_t>& seed, const std::string& out) {
    const auto plant = vl::io::load_plant(plant_path);
    const auto table = vl::io::read_csv(inputs_path);
    Eigen::MatrixXd inputs(table.rows(), static_cast<Eigen::Index>(plant.inputs.size()));
    for (std::size_t i = 0; i < plant.inputs.size(); ++i) inputs.col(i) = table.column(plant.inputs[i]);
    const auto result = vl::simulate_plant(plant.plant, inputs, echo_seed(seed));
    auto header = plant.inputs;
    header.push_back(plant.output);
    std::vector<Eigen::VectorXd> columns;
    for (Eigen::Index i = 0; i < inputs.cols(); ++i) columns.push_back(inputs.col(i));
    columns.push_back(result.output);
    vl::io::write_file_atomic(out, vl::io::format_csv(header, columns));
    return 0;
}

int run_generate(const std::string& spec_path, const std::optional<std::uint64_t>& seed,
                 const std::string& out) {
    const auto j = json::parse(vl::io::read_file(spec_path));
    if (!j.contains("signals") || !j["signals"].is_array())
        throw vl::SchemaError("signals: required array is missing");
    const auto length = j.value("length", Eigen::Index{0});
    std::vector<std::string> names;
    std::vector<vl::InputSignalSpec> specs;
    for (std::size_t k = 0; k < j["signals"].size(); ++k) {
        const auto& entry = j["signals"][k];
        const std::string path = "signals[" + std::to_string(k) + "]";
        specs.push_back(vl::io::input_spec_from_json(entry, path));
        if (specs.back().length == 0) specs.back().length = length;
        names.push_back(entry.value("name", "u" + std::to_string(k + 1)));
    }
    const auto inputs = vl::generate_inputs(specs, echo_seed(seed));
    std::vector<Eigen::VectorXd> columns;
    for (Eigen::Index i = 0; i < inputs.cols(); ++i) columns.push_back(inputs.col(i));
    vl::io::write_file_atomic(out, vl::io::format_csv(names, columns));
    return 0;
}

int run_evaluate(const std::string& model_path, const std::string& data_path, const Window& window,
                 const std::string& out) {
    const auto file = vl::io::load_model(model_path);
    const auto& s = file.model.structure;
    auto table = vl::io::read_csv(data_path);
    difference_columns(table, differenced_names(file.differenced));
    const auto data = vl::io::dataset_from_table(table, s.input_names, s.output_name);
    const auto [start, rows] = window.resolve(data, s.memory_length);
    const auto m = vl::evaluate(file.model, data, start, rows);
    const json j = {{"sse", m.sse},
                    {"mse", m.mse},
                    {"normalized_sse", m.normalized_defined ? json(m.normalized_sse) : json(nullptr)},
                    {"normalized_sse_defined", m.normalized_defined},
                    {"rows", m.rows},
                    {"start", start}};
    vl::io::write_file_atomic(out, vl::io::dump(j));
    return 0;
}

int run_experiment(const std::string& config_path, const std::string& out,
                   const std::string& summary_path) {
    const auto setup = vl::io::load_experiment(config_path);
    std::vector<vl::TrialRecord> table;
    for (auto mode : setup.modes) {
        auto arm = vl::run_experiment(setup.config, mode, setup.dataset);
        table.insert(table.end(), arm.begin(), arm.end());
    }
    vl::io::write_file_atomic(out, vl::io::format_trials_csv(table));
    if (!summary_path.empty()) {
        auto summary = vl::io::summary_to_json(vl::summarize(table, setup.histogram_bins));
        summary["seed"] = setup.config.seed;
        summary["rng"] = std::string(vl::Rng::algorithm);
        int resamples = 0;
        for (const auto& r : table) resamples += r.resamples;
        summary["resamples"] = resamples;
        vl::io::write_file_atomic(summary_path, vl::io::dump(summary));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volterra-Laguerre system identification toolkit"};
    app.require_subcommand(1);
    int status = 0;

    // laguerre
    int lag_order = 0, lag_memory = 0;
    double lag_scale = 0.0, lag_dt = 1.0;
    std::string lag_out;
    auto* lag = app.add_subcommand("laguerre", "Sample a Laguerre basis as CSV (t,l0,l1,...)");
    lag->add_option("--order", lag_order, "Number of basis functions R")->required();
    lag->add_option("--time-scale", lag_scale, "Time scale a (per sample)")->required();
    lag->add_option("--memory", lag_memory, "Last sample time M")->required();
    lag->add_option("--dt", lag_dt, "Grid step (default 1)");
    lag->add_option("--out", lag_out, "Output file (default stdout)");
    lag->callback([&] { status = run_laguerre(lag_order, lag_scale, lag_memory, lag_dt, lag_out); });

    // count
    std::string count_structure;
    auto* count = app.add_subcommand("count", "Print parameter counts for a structure");
    count->add_option("--structure", count_structure, "Structure JSON")->required();
    count->callback([&] { status = run_count(count_structure); });

    // fit
    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit model coefficients by least squares");
    fit->add_option("--data", fit_args.data, "Data CSV")->required();
    fit->add_option("--structure", fit_args.structure, "Structure JSON")->required();
    fit->add_option("--out", fit_args.out, "Model JSON to write")->required();
    fit->add_option("--ridge", fit_args.ridge, "Ridge penalty (overrides the structure flag)");
    fit->add_option("--difference", fit_args.difference, "Difference this column first (repeatable)");
    fit->add_flag("--strict", fit_args.strict, "Reject unknown structure fields");
    fit_args.window.add_options(fit);
    fit->callback([&] { status = run_fit(fit_args); });

    // predict
    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "Predict the output with a fitted model");
    predict->add_option("--model", predict_args.model, "Model JSON")->required();
    predict->add_option("--data", predict_args.data, "Data CSV")->required();
    predict->add_option("--out", predict_args.out, "Prediction CSV (column y_hat)")->required();
    predict_args.window.add_options(predict);
    predict->callback([&] { status = run_predict(predict_args); });

    // tune
    TuneArgs tune_args;
    auto* tune = app.add_subcommand("tune", "Optimize Laguerre time scales");
    tune->add_option("--data", tune_args.data, "Data CSV")->required();
    tune->add_option("--structure", tune_args.structure, "Initial structure JSON")->required();
    tune->add_option("--out", tune_args.out, "Tuned structure JSON")->required();
    tune->add_option("--bounds", tune_args.bounds, "Time-scale bounds LOW,HIGH (default 0.005,100)");
    tune->add_option("--starts", tune_args.starts, "Multistart count (default 8)");
    tune->add_option("--budget", tune_args.budget, "Objective evaluation budget (default 2000)");
    tune->add_option("--seed", tune_args.seed, "Seed for start points (default 0)");
    tune->add_option("--val-split", tune_args.val_split, "Held-out tail fraction (default 0)");
    tune->add_option("--ridge", tune_args.ridge, "Ridge penalty (overrides the structure flag)");
    tune->add_option("--trace", tune_args.trace, "Trace CSV (default <out>.trace.csv)");
    tune_args.window.add_options(tune);
    tune->callback([&] { status = run_tune(tune_args); });

    // simulate
    std::string sim_plant, sim_inputs, sim_out;
    std::optional<std::uint64_t> sim_seed;
    auto* simulate = app.add_subcommand("simulate", "Simulate a synthetic plant");
    simulate->add_option("--plant", sim_plant, "Plant JSON")->required();
    simulate->add_option("--inputs", sim_inputs, "Input CSV")->required();
    simulate->add_option("--seed", sim_seed, "Noise seed (default 0)");
    simulate->add_option("--out", sim_out, "Output CSV (inputs plus output column)")->required();
    simulate->callback([&] { status = run_simulate(sim_plant, sim_inputs, sim_seed, sim_out); });

    // generate-inputs
    std::string gen_spec, gen_out;
    std::optional<std::uint64_t> gen_seed;
    auto* generate = app.add_subcommand("generate-inputs", "Generate excitation signals as CSV");
    generate->add_option("--spec", gen_spec, "Signal spec JSON")->required();
    generate->add_option("--seed", gen_seed, "Seed (default 0)");
    generate->add_option("--out", gen_out, "Output CSV")->required();
    generate->callback([&] { status = run_generate(gen_spec, gen_seed, gen_out); });

    // evaluate
    std::string eval_model, eval_data, eval_out;
    Window eval_window;
    auto* evaluate = app.add_subcommand("evaluate", "Score a model on data");
    evaluate->add_option("--model", eval_model, "Model JSON")->required();
    evaluate->add_option("--data", eval_data, "Data CSV")->required();
    evaluate->add_option("--out", eval_out, "Metrics JSON")->required();
    eval_window.add_options(evaluate);
    evaluate->callback([&] { status = run_evaluate(eval_model, eval_data, eval_window, eval_out); });

    // experiment
    std::string exp_config, exp_out, exp_summary;
    auto* experiment = app.add_subcommand("experiment", "Fixed vs variable parameter experiment");
    experiment->add_option("--config", exp_config, "Experiment JSON")->required();
    experiment->add_option("--out", exp_out, "Trial table CSV")->required();
    experiment->add_option("--summary", exp_summary, "Summary JSON");
    experiment->callback([&] { status = run_experiment(exp_config, exp_out, exp_summary); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: UsageError: " << e.what() << "\n";
        return 2;
    } catch (const vl::Error& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: SchemaError: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: InternalError: " << e.what() << "\n";
        return 1;
    }
    return status;
}
