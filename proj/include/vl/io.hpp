#ifndef VL_IO_HPP
#define VL_IO_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "vl/error.hpp"
#include "vl/experiment.hpp"
#include "vl/model.hpp"
#include "vl/regressor.hpp"
#include "vl/simulate.hpp"

namespace vl::io {

inline constexpr int schema_version = 1;
inline constexpr const char* toolkit_version = "0.1.0";

#define VL_DEFINE_CSV_ERROR(Name)                                            \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name, what) {}       \
    }
VL_DEFINE_CSV_ERROR(MissingColumn);
VL_DEFINE_CSV_ERROR(RaggedRow);
VL_DEFINE_CSV_ERROR(NonNumericCell);
VL_DEFINE_CSV_ERROR(EmptyFile);
#undef VL_DEFINE_CSV_ERROR

/// %.17g: enough digits to round-trip any double.
std::string format_double(double value);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

/// Numeric CSV with a header row; every cell must parse as a finite number.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<Eigen::VectorXd> columns;

    Eigen::Index rows() const { return columns.empty() ? 0 : columns.front().size(); }
    const Eigen::VectorXd& column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<Eigen::VectorXd>& columns);

/// Selects named columns; file column order is irrelevant. An empty
/// `output_name` leaves the output zero-filled (prediction-only data).
Dataset load_csv(const std::filesystem::path& path, const std::vector<std::string>& input_names,
                 const std::string& output_name);
Dataset dataset_from_table(const CsvTable& table, const std::vector<std::string>& input_names,
                           const std::string& output_name);
void save_csv(const std::filesystem::path& path, const Dataset& dataset);

// Structure files.
nlohmann::json structure_to_json(const ModelStructure& structure);
ModelStructure structure_from_json(const nlohmann::json& j, bool strict = false);
void save_structure(const std::filesystem::path& path, const ModelStructure& structure);
ModelStructure load_structure(const std::filesystem::path& path, bool strict = false);

/// A differenced column and the sample that restores it.
struct DifferencedColumn {
    std::string column;
    double initial = 0.0;

    friend bool operator==(const DifferencedColumn&, const DifferencedColumn&) = default;
};

/// Everything a model file holds beyond the fitted model itself.
struct ModelFile {
    FittedModel model;
    Eigen::Index fit_start = 0;
    Eigen::Index fit_rows = 0;
    std::vector<DifferencedColumn> differenced;
};

nlohmann::json model_to_json(const ModelFile& file);
ModelFile model_from_json(const nlohmann::json& j, bool strict = false);
void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path, bool strict = false);

/// Plant description plus the names of the columns it reads and writes.
struct PlantFile {
    SyntheticPlant plant;
    std::vector<std::string> inputs;
    std::string output = "y";
};

PlantFile plant_from_json(const nlohmann::json& j);
PlantFile load_plant(const std::filesystem::path& path);

InputSignalSpec input_spec_from_json(const nlohmann::json& j, const std::string& path);

/// Experiment config and its resolved dataset (CSV on disk or a simulated plant).
struct ExperimentSetup {
    ExperimentConfig config;
    std::vector<ExperimentMode> modes;
    int histogram_bins = 20;
    Dataset dataset;
};

ExperimentSetup experiment_from_json(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir);
ExperimentSetup load_experiment(const std::filesystem::path& path);

std::string format_trials_csv(const std::vector<TrialRecord>& table);
nlohmann::json summary_to_json(const ExperimentSummary& summary);

/// Serializes `j` with sorted keys, 2-space indent, and a trailing newline.
std::string dump(const nlohmann::json& j);

} // namespace vl::io

#endif // VL_IO_HPP
