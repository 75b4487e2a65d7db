#pragma once

#include <filesystem>
#include <string>

namespace tamperkit {

/// Runtime configuration, loadable from a flat key/value file with
/// [sections]. Command-line flags override file values; secrets only ever
/// arrive through the environment variable named here.
struct Config {
    // [annotator]
    std::string endpoint;
    std::string model_id;
    std::string api_key_env = "ANNOTATOR_API_KEY";
    double temperature = 0.0;
    int max_retries = 3;
    int concurrency = 4;
    std::string fixtures_dir; // non-empty selects the mock client

    // [scoring]
    std::string word_vectors;
    std::string stopwords;
    double filter_threshold = 0.8;
    int classify_max_edit = 3;
    double iou_threshold = 0.5;

    // [solver]
    double solver_tol = 1e-3;
    int solver_max_iters = 0; // 0 = 10x unknowns

    /// Range checks; throws SchemaError on violation.
    void validate() const;
};

/// Parses `key = value` lines under [annotator]/[scoring]/[solver] sections.
/// '#' and ';' start comments. Unknown keys are rejected.
Config load_config(const std::filesystem::path& path);

} // namespace tamperkit
