#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "spheremix/fit.hpp"
#include "spheremix/synth.hpp"

namespace spheremix {

inline constexpr const char* kToolVersion = "0.1.0";

// Thrown on malformed inputs; the CLI maps it to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Doubles are written with shortest round-trip formatting (std::to_chars), so
// write -> read -> write is byte-identical. All files are UTF-8 with LF.
std::string format_double(double v);
double parse_double(const std::string& s);

// headered matrix CSV: id column + dim_0..dim_{c-1}
void write_matrix_csv(const std::filesystem::path& path, const std::string& id_column,
                      const std::vector<int>& ids, const Eigen::MatrixXd& m);
std::pair<std::vector<int>, Eigen::MatrixXd> read_matrix_csv(const std::filesystem::path& path,
                                                             const std::string& id_column);

void write_labels_csv(const std::filesystem::path& path, const std::string& id_column,
                      const std::vector<int>& ids, const Eigen::VectorXi& labels);
std::pair<std::vector<int>, Eigen::VectorXi> read_labels_csv(const std::filesystem::path& path,
                                                             const std::string& id_column);

void write_pairs_csv(const std::filesystem::path& path, const RelationalPairSet& pairs);
RelationalPairSet read_pairs_csv(const std::filesystem::path& path, int n);

void write_priors_csv(const std::filesystem::path& path, const PriorMatrix& priors);
PriorMatrix read_priors_csv(const std::filesystem::path& path, int n, int K);

// per-source embeddings: source_<l>.csv with feature_id + dim columns
void write_universe(const std::filesystem::path& dir, const FeatureUniverse& u);
FeatureUniverse read_universe(const std::filesystem::path& dir, bool require_unit_rows = true);

void write_model(const std::filesystem::path& dir, const ModelState& s,
                 const CompositeWeights& w);
ModelState read_model(const std::filesystem::path& dir);

void write_trace_csv(const std::filesystem::path& path, const FitTrace& trace);

void write_scenario(const std::filesystem::path& dir, const Scenario& sc);
Scenario read_scenario(const std::filesystem::path& dir);

// 64-bit FNV-1a over the canonical (sorted-key, shortest-round-trip) JSON text;
// stable across runs and platforms.
std::string config_digest(const std::string& canonical_json);

struct ReplicationStatus {
    int id = 0;
    std::string status;  // ok | nonconverged | failed
    std::vector<std::string> outputs;
};

struct RunManifest {
    std::string command;
    std::string digest;
    std::vector<std::uint64_t> seeds;
    std::string version = kToolVersion;
    std::vector<ReplicationStatus> replications;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& m);

ScenarioConfig scenario_config_from_json(const std::string& text);
std::string scenario_config_to_json(const ScenarioConfig& cfg);  // canonical
FitConfig fit_config_from_json(const std::string& text);
std::string fit_config_to_json(const FitConfig& cfg);  // canonical

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace spheremix
