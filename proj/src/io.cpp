#include "vl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "vl/rng.hpp"

namespace vl::io {

using nlohmann::json;

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                          ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t begin = 0;
    while (true) {
        const auto comma = line.find(',', begin);
        cells.push_back(trim(std::string_view(line).substr(begin, comma - begin)));
        if (comma == std::string::npos) break;
        begin = comma + 1;
    }
    return cells;
}

} // namespace

const Eigen::VectorXd& CsvTable::column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == name) return columns[c];
    throw MissingColumn("column '" + name + "' not found in CSV header");
}

bool CsvTable::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw EmptyFile(path.string() + " has no header row");
    table.header = split_line(line);

    std::vector<std::vector<double>> values(table.header.size());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = split_line(line);
        if (cells.size() != table.header.size())
            throw RaggedRow(path.string() + ": row " + std::to_string(row) + " (line " +
                            std::to_string(line_no) + ") has " + std::to_string(cells.size()) +
                            " cells, header has " + std::to_string(table.header.size()));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double v = 0.0;
            const auto* first = cells[c].data();
            const auto* last = first + cells[c].size();
            if (!cells[c].empty() && *first == '+') ++first;
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (cells[c].empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
                throw NonNumericCell(path.string() + ": row " + std::to_string(row) + " (line " +
                                     std::to_string(line_no) + "), column '" + table.header[c] +
                                     "': '" + cells[c] + "' is not a finite number");
            values[c].push_back(v);
        }
    }
    if (row == 0) throw EmptyFile(path.string() + " has a header but no data rows");
    for (auto& v : values)
        table.columns.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    return table;
}

std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<Eigen::VectorXd>& columns) {
    if (header.size() != columns.size()) throw InvalidParameter("CSV header/column mismatch");
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    out += "\n";
    const Eigen::Index rows = columns.empty() ? 0 : columns.front().size();
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c].size() != rows) throw InvalidParameter("CSV columns differ in length");
            out += (c ? "," : "") + format_double(columns[c](r));
        }
        out += "\n";
    }
    return out;
}

Dataset dataset_from_table(const CsvTable& table, const std::vector<std::string>& input_names,
                           const std::string& output_name) {
    if (input_names.empty()) throw SchemaError("at least one input column is required");
    Dataset d;
    d.input_names = input_names;
    d.output_name = output_name;
    d.inputs.resize(table.rows(), static_cast<Eigen::Index>(input_names.size()));
    for (std::size_t i = 0; i < input_names.size(); ++i) d.inputs.col(i) = table.column(input_names[i]);
    d.output = output_name.empty() ? Eigen::VectorXd::Zero(table.rows()).eval()
                                   : table.column(output_name);
    return d;
}

Dataset load_csv(const std::filesystem::path& path, const std::vector<std::string>& input_names,
                 const std::string& output_name) {
    return dataset_from_table(read_csv(path), input_names, output_name);
}

void save_csv(const std::filesystem::path& path, const Dataset& dataset) {
    std::vector<std::string> header = dataset.input_names;
    std::vector<Eigen::VectorXd> columns;
    for (Eigen::Index i = 0; i < dataset.inputs.cols(); ++i) columns.push_back(dataset.inputs.col(i));
    header.push_back(dataset.output_name);
    columns.push_back(dataset.output);
    write_file_atomic(path, format_csv(header, columns));
}

// ---------------------------------------------------------------------------
// JSON helpers

namespace {

/// Object accessor that names the offending field path in every error.
class Fields {
public:
    Fields(const json& j, std::string path, bool strict) : j_(j), path_(std::move(path)), strict_(strict) {
        if (!j_.is_object()) throw SchemaError(where() + ": expected an object");
    }

    std::string where() const { return path_.empty() ? "<root>" : path_; }
    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const json& at(const std::string& key) const {
        seen_.insert(key);
        if (!j_.contains(key)) throw SchemaError(child(key) + ": required field is missing");
        return j_.at(key);
    }

    template <typename T>
    T get(const std::string& key) const {
        return convert<T>(at(key), child(key));
    }

    template <typename T>
    T get_or(const std::string& key, T fallback) const {
        return has(key) ? get<T>(key) : fallback;
    }

    /// Under strict parsing, rejects keys nobody asked about.
    void finish() const {
        if (!strict_) return;
        for (const auto& item : j_.items())
            if (!seen_.count(item.key())) throw SchemaError(child(item.key()) + ": unknown field");
    }

    template <typename T>
    static T convert(const json& value, const std::string& path) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!value.is_boolean()) throw SchemaError(path + ": expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!value.is_number_integer()) throw SchemaError(path + ": expected an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (value.is_null()) return std::numeric_limits<T>::infinity();
            if (!value.is_number()) throw SchemaError(path + ": expected a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!value.is_string()) throw SchemaError(path + ": expected a string");
        }
        return value.get<T>();
    }

private:
    const json& j_;
    std::string path_;
    bool strict_;
    mutable std::set<std::string> seen_;
};

const json& expect_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path + ": expected an array");
    return j;
}

std::vector<double> number_array(const json& j, const std::string& path) {
    std::vector<double> out;
    for (std::size_t k = 0; k < expect_array(j, path).size(); ++k)
        out.push_back(Fields::convert<double>(j[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void check_version(const Fields& f) {
    const int version = f.get<int>("schema_version");
    if (version != schema_version)
        throw SchemaError(f.child("schema_version") + ": unsupported version " +
                          std::to_string(version));
}

} // namespace

// ---------------------------------------------------------------------------
// Structures

json structure_to_json(const ModelStructure& s) {
    json inputs = json::array();
    for (int i = 0; i < s.num_inputs(); ++i) {
        json terms = json::array();
        for (int n = 1; n <= s.degrees[i]; ++n)
            terms.push_back({{"R", s.spec(n, i).order_count}, {"a", s.spec(n, i).time_scale}});
        const std::string name = s.input_names.empty() ? "u" + std::to_string(i) : s.input_names[i];
        inputs.push_back({{"name", name}, {"degree", s.degrees[i]}, {"terms", terms}});
    }
    return {{"schema_version", schema_version},
            {"memory", s.memory_length},
            {"sample_interval", s.sample_interval},
            {"output", s.output_name},
            {"inputs", inputs},
            {"flags", {{"constant_column", s.constant_column}, {"ridge", s.ridge}}}};
}

ModelStructure structure_from_json(const json& j, bool strict) {
    Fields root(j, "", strict);
    check_version(root);
    ModelStructure s;
    s.memory_length = root.get<int>("memory");
    s.sample_interval = root.get_or<double>("sample_interval", 1.0);
    s.output_name = root.get<std::string>("output");
    const auto& inputs = expect_array(root.at("inputs"), "inputs");
    if (inputs.empty()) throw SchemaError("inputs: at least one input is required");
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const std::string path = "inputs[" + std::to_string(i) + "]";
        Fields input(inputs[i], path, strict);
        s.input_names.push_back(input.get<std::string>("name"));
        const int degree = input.get<int>("degree");
        if (degree < 1) throw SchemaError(input.child("degree") + ": must be >= 1");
        const auto& terms = expect_array(input.at("terms"), input.child("terms"));
        if (static_cast<int>(terms.size()) != degree)
            throw SchemaError(input.child("terms") + ": expected " + std::to_string(degree) +
                              " entries (one per term up to the degree), found " +
                              std::to_string(terms.size()));
        s.degrees.push_back(degree);
        std::vector<LaguerreSeriesSpec> specs;
        for (std::size_t n = 0; n < terms.size(); ++n) {
            Fields term(terms[n], input.child("terms") + "[" + std::to_string(n) + "]", strict);
            LaguerreSeriesSpec spec;
            spec.order_count = term.get<int>("R");
            spec.time_scale = term.get<double>("a");
            if (spec.order_count < 1) throw SchemaError(term.child("R") + ": must be >= 1");
            if (!(spec.time_scale > 0.0) || !std::isfinite(spec.time_scale))
                throw SchemaError(term.child("a") + ": must be finite and > 0");
            term.finish();
            specs.push_back(spec);
        }
        s.specs.push_back(std::move(specs));
        input.finish();
    }
    if (root.has("flags")) {
        Fields flags(root.at("flags"), "flags", strict);
        s.constant_column = flags.get_or<bool>("constant_column", false);
        s.ridge = flags.get_or<double>("ridge", 0.0);
        flags.finish();
    }
    root.finish();
    try {
        s.validate();
    } catch (const InvalidParameter& e) {
        throw SchemaError(std::string("structure: ") + e.what());
    }
    return s;
}

void save_structure(const std::filesystem::path& path, const ModelStructure& structure) {
    write_file_atomic(path, dump(structure_to_json(structure)));
}

namespace {
json parse_json_file(const std::filesystem::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": invalid JSON: " + e.what());
    }
}
} // namespace

ModelStructure load_structure(const std::filesystem::path& path, bool strict) {
    return structure_from_json(parse_json_file(path), strict);
}

// ---------------------------------------------------------------------------
// Models

json model_to_json(const ModelFile& file) {
    const auto& m = file.model;
    json index = json::array();
    for (const auto& entry : m.index) {
        json factors = json::array();
        for (const auto& [input, order] : entry.factors) factors.push_back({input, order});
        index.push_back({{"term", entry.term}, {"factors", factors}});
    }
    json differenced = json::array();
    for (const auto& d : file.differenced)
        differenced.push_back({{"column", d.column}, {"initial", d.initial}});
    std::vector<double> theta(m.theta.data(), m.theta.data() + m.theta.size());
    return {{"schema_version", schema_version},
            {"toolkit_version", toolkit_version},
            {"structure", structure_to_json(m.structure)},
            {"theta", theta},
            {"index", index},
            {"fit_stats",
             {{"sse", finite_or_null(m.fit_stats.sse)},
              {"num_rows", m.fit_stats.num_rows},
              {"condition_estimate", finite_or_null(m.fit_stats.condition_estimate)},
              {"rank", m.fit_stats.rank},
              {"underdetermined", m.fit_stats.underdetermined}}},
            {"fit_window", {{"start", file.fit_start}, {"rows", file.fit_rows}}},
            {"preprocessing", {{"difference", differenced}}}};
}

ModelFile model_from_json(const json& j, bool strict) {
    Fields root(j, "", strict);
    check_version(root);
    root.get<std::string>("toolkit_version");
    ModelFile file;
    auto& m = file.model;
    m.structure = structure_from_json(root.at("structure"), strict);
    m.theta = to_vector(number_array(root.at("theta"), "theta"));

    const auto& index = expect_array(root.at("index"), "index");
    for (std::size_t k = 0; k < index.size(); ++k) {
        const std::string path = "index[" + std::to_string(k) + "]";
        Fields entry(index[k], path, strict);
        CoefficientIndex ci;
        ci.term = entry.get<int>("term");
        const auto& factors = expect_array(entry.at("factors"), entry.child("factors"));
        for (std::size_t f = 0; f < factors.size(); ++f) {
            const std::string fp = entry.child("factors") + "[" + std::to_string(f) + "]";
            if (!factors[f].is_array() || factors[f].size() != 2)
                throw SchemaError(fp + ": expected [input, order]");
            ci.factors.emplace_back(Fields::convert<int>(factors[f][0], fp + "[0]"),
                                    Fields::convert<int>(factors[f][1], fp + "[1]"));
        }
        entry.finish();
        m.index.push_back(std::move(ci));
    }

    Fields stats(root.at("fit_stats"), "fit_stats", strict);
    m.fit_stats.sse = stats.get<double>("sse");
    m.fit_stats.num_rows = stats.get<std::int64_t>("num_rows");
    m.fit_stats.condition_estimate = stats.get<double>("condition_estimate");
    m.fit_stats.rank = stats.get_or<std::int64_t>("rank", 0);
    m.fit_stats.underdetermined = stats.get_or<bool>("underdetermined", false);
    stats.finish();

    if (root.has("fit_window")) {
        Fields window(root.at("fit_window"), "fit_window", strict);
        file.fit_start = window.get<Eigen::Index>("start");
        file.fit_rows = window.get<Eigen::Index>("rows");
        window.finish();
    }
    if (root.has("preprocessing")) {
        Fields pre(root.at("preprocessing"), "preprocessing", strict);
        if (pre.has("difference")) {
            const auto& diffs = expect_array(pre.at("difference"), "preprocessing.difference");
            for (std::size_t k = 0; k < diffs.size(); ++k) {
                Fields d(diffs[k], "preprocessing.difference[" + std::to_string(k) + "]", strict);
                file.differenced.push_back({d.get<std::string>("column"), d.get<double>("initial")});
                d.finish();
            }
        }
        pre.finish();
    }
    root.finish();

    if (m.theta.size() != static_cast<Eigen::Index>(m.index.size()))
        throw IntegrityError("model has " + std::to_string(m.theta.size()) + " theta entries but " +
                             std::to_string(m.index.size()) + " index entries");
    if (m.index != coefficient_index(m.structure))
        throw IntegrityError("coefficient index does not match the structure's column layout");
    return file;
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
    write_file_atomic(path, dump(model_to_json(file)));
}

ModelFile load_model(const std::filesystem::path& path, bool strict) {
    return model_from_json(parse_json_file(path), strict);
}

// ---------------------------------------------------------------------------
// Plants and excitation

PlantFile plant_from_json(const json& j) {
    Fields root(j, "", false);
    PlantFile file;
    auto& plant = file.plant;
    plant.memory = root.get<int>("memory");
    plant.noise_std = root.get_or<double>("noise_std", 0.0);
    file.output = root.get_or<std::string>("output", "y");
    const auto& inputs = expect_array(root.at("inputs"), "inputs");
    for (std::size_t i = 0; i < inputs.size(); ++i)
        file.inputs.push_back(Fields::convert<std::string>(inputs[i], "inputs[" + std::to_string(i) + "]"));

    const auto& branches = expect_array(root.at("branches"), "branches");
    for (std::size_t b = 0; b < branches.size(); ++b) {
        Fields f(branches[b], "branches[" + std::to_string(b) + "]", false);
        PlantBranch branch;
        const auto input = f.get<std::string>("input");
        const auto it = std::find(file.inputs.begin(), file.inputs.end(), input);
        if (it == file.inputs.end())
            throw SchemaError(f.child("input") + ": '" + input + "' is not a declared input");
        branch.input = static_cast<int>(it - file.inputs.begin());
        const auto kind = f.get<std::string>("kind");
        if (kind == "wiener") {
            branch.kind = PlantBranch::Kind::Wiener;
            if (f.has("impulse_response")) {
                branch.impulse_response =
                    to_vector(number_array(f.at("impulse_response"), f.child("impulse_response")));
            } else {
                // Exponential filter gain * exp(-pole * j).
                const double pole = f.get<double>("pole");
                const double gain = f.get_or<double>("gain", 1.0);
                branch.impulse_response.resize(plant.memory + 1);
                for (int t = 0; t <= plant.memory; ++t)
                    branch.impulse_response(t) = gain * std::exp(-pole * t);
            }
            branch.polynomial = number_array(f.at("polynomial"), f.child("polynomial"));
        } else if (kind == "volterra") {
            branch.kind = PlantBranch::Kind::FiniteVolterra;
            const auto& kernels = expect_array(f.at("kernels"), f.child("kernels"));
            for (std::size_t n = 0; n < kernels.size(); ++n)
                branch.kernels.push_back(to_vector(
                    number_array(kernels[n], f.child("kernels") + "[" + std::to_string(n) + "]")));
        } else {
            throw SchemaError(f.child("kind") + ": expected 'wiener' or 'volterra', got '" + kind + "'");
        }
        plant.branches.push_back(std::move(branch));
    }
    try {
        plant.validate(static_cast<int>(file.inputs.size()));
    } catch (const InvalidParameter& e) {
        throw SchemaError(e.what());
    }
    return file;
}

PlantFile load_plant(const std::filesystem::path& path) { return plant_from_json(parse_json_file(path)); }

InputSignalSpec input_spec_from_json(const json& j, const std::string& path) {
    Fields f(j, path, false);
    InputSignalSpec spec;
    const auto kind = f.get<std::string>("kind");
    if (kind == "two-level") spec.kind = InputSignalSpec::Kind::TwoLevel;
    else if (kind == "filtered-noise") spec.kind = InputSignalSpec::Kind::FilteredNoise;
    else if (kind == "multisine") spec.kind = InputSignalSpec::Kind::Multisine;
    else throw SchemaError(f.child("kind") + ": unknown excitation kind '" + kind + "'");
    spec.length = f.get_or<Eigen::Index>("length", 0);
    spec.low = f.get_or<double>("low", spec.low);
    spec.high = f.get_or<double>("high", spec.high);
    spec.dwell = f.get_or<int>("dwell", spec.dwell);
    spec.gain = f.get_or<double>("gain", spec.gain);
    spec.pole = f.get_or<double>("pole", spec.pole);
    spec.tones = f.get_or<int>("tones", spec.tones);
    spec.band_low = f.get_or<double>("band_low", spec.band_low);
    spec.band_high = f.get_or<double>("band_high", spec.band_high);
    spec.amplitude = f.get_or<double>("amplitude", spec.amplitude);
    return spec;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

template <typename T>
std::pair<T, T> range_field(const Fields& f, const std::string& key, std::pair<T, T> fallback) {
    if (!f.has(key)) return fallback;
    const auto& j = f.at(key);
    if (!j.is_array() || j.size() != 2) throw SchemaError(f.child(key) + ": expected [low, high]");
    return {Fields::convert<T>(j[0], f.child(key) + "[0]"),
            Fields::convert<T>(j[1], f.child(key) + "[1]")};
}

} // namespace

ExperimentSetup experiment_from_json(const json& j, const std::filesystem::path& base_dir) {
    Fields root(j, "", false);
    ExperimentSetup setup;
    auto& c = setup.config;
    c.trials = root.get_or<int>("trials", c.trials);
    std::tie(c.degree_min, c.degree_max) = range_field<int>(root, "degree_domain", {c.degree_min, c.degree_max});
    std::tie(c.order_min, c.order_max) = range_field<int>(root, "order_domain", {c.order_min, c.order_max});
    std::tie(c.scale_min, c.scale_max) =
        range_field<double>(root, "timescale_domain", {c.scale_min, c.scale_max});
    c.seed = root.get_or<std::uint64_t>("seed", 0);
    c.memory = root.get_or<int>("memory", c.memory);
    if (root.has("start")) c.start = root.get<Eigen::Index>("start");
    if (root.has("rows")) c.rows = root.get<Eigen::Index>("rows");
    c.ridge = root.get_or<double>("ridge", 0.0);
    c.validation_split = root.get_or<double>("validation_split", 0.0);
    setup.histogram_bins = root.get_or<int>("histogram_bins", 20);
    if (root.has("forced")) {
        Fields forced(root.at("forced"), "forced", false);
        c.forced = UniformParameters{forced.get<int>("degree"), forced.get<int>("order"),
                                     forced.get<double>("time_scale")};
    }
    const auto mode = root.get_or<std::string>("mode", "both");
    if (mode == "both") setup.modes = {ExperimentMode::Fixed, ExperimentMode::Variable};
    else setup.modes = {parse_mode(mode)};

    if (root.has("data")) {
        Fields data(root.at("data"), "data", false);
        auto csv = std::filesystem::path(data.get<std::string>("csv"));
        if (csv.is_relative()) csv = base_dir / csv;
        std::vector<std::string> inputs;
        const auto& names = expect_array(data.at("inputs"), "data.inputs");
        for (std::size_t k = 0; k < names.size(); ++k)
            inputs.push_back(Fields::convert<std::string>(names[k], "data.inputs[" + std::to_string(k) + "]"));
        try {
            setup.dataset = load_csv(csv, inputs, data.get<std::string>("output"));
        } catch (const IoError& e) {
            throw ConfigError(std::string("data reference cannot be resolved: ") + e.what());
        }
    } else if (root.has("plant")) {
        Fields plant_fields(root.at("plant"), "plant", false);
        const auto plant = plant_from_json(root.at("plant"));
        const auto& excitation = expect_array(plant_fields.at("excitation"), "plant.excitation");
        if (excitation.size() != plant.inputs.size())
            throw SchemaError("plant.excitation: need one entry per plant input");
        const auto length = plant_fields.get<Eigen::Index>("length");
        std::vector<InputSignalSpec> specs;
        for (std::size_t k = 0; k < excitation.size(); ++k) {
            specs.push_back(input_spec_from_json(excitation[k], "plant.excitation[" + std::to_string(k) + "]"));
            specs.back().length = length;
        }
        const auto data_seed = plant_fields.get_or<std::uint64_t>("seed", c.seed);
        Dataset& d = setup.dataset;
        d.input_names = plant.inputs;
        d.output_name = plant.output;
        d.inputs = generate_inputs(specs, data_seed);
        d.output = simulate_plant(plant.plant, d.inputs, Rng::splitmix64(data_seed)).output;
    } else {
        throw ConfigError("experiment config needs a 'data' or 'plant' reference");
    }
    c.validate();
    return setup;
}

ExperimentSetup load_experiment(const std::filesystem::path& path) {
    return experiment_from_json(parse_json_file(path), path.parent_path());
}

std::string format_trials_csv(const std::vector<TrialRecord>& table) {
    std::string out = "trial,mode,params_json,sse,resamples\n";
    for (const auto& r : table) {
        json params = json::array();
        for (int i = 0; i < r.structure.num_inputs(); ++i) {
            json terms = json::array();
            for (int n = 1; n <= r.structure.degrees[i]; ++n)
                terms.push_back({{"R", r.structure.spec(n, i).order_count},
                                 {"a", r.structure.spec(n, i).time_scale}});
            params.push_back({{"input", r.structure.input_names.empty() ? std::to_string(i)
                                                                         : r.structure.input_names[i]},
                              {"N", r.structure.degrees[i]},
                              {"terms", terms}});
        }
        std::string quoted = params.dump();
        std::string escaped;
        for (char ch : quoted) {
            if (ch == '"') escaped += '"';
            escaped += ch;
        }
        out += std::to_string(r.trial) + "," + to_string(r.mode) + ",\"" + escaped + "\"," +
               format_double(r.sse) + "," + std::to_string(r.resamples) + "\n";
    }
    return out;
}

json summary_to_json(const ExperimentSummary& summary) {
    json arms = json::object();
    for (const auto& arm : summary.arms)
        arms[to_string(arm.mode)] = {{"count", arm.count},
                                     {"mean", arm.mean},
                                     {"median", arm.median},
                                     {"std", arm.std_dev},
                                     {"min", arm.min},
                                     {"max", arm.max},
                                     {"normalized_mean", finite_or_null(arm.normalized_mean)},
                                     {"histogram",
                                      {{"edges", arm.histogram.edges}, {"counts", arm.histogram.counts}}}};
    return {{"global_min", summary.global_min}, {"global_max", summary.global_max}, {"arms", arms}};
}

} // namespace vl::io
