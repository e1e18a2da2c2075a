#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace conformal::cli {

enum class Task { regress, classify, timeseries, synth, bench };
enum class OutputFormat { json, csv };

/// Bad flags or configuration; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
    Task task = Task::regress;

    std::string data;
    std::string test_data;
    std::string calib_data;
    std::string target = "y";

    // Empty means the task default: plus / score / enbpi.
    std::string method;
    // "prefit", "loo", "bootstrap", or an integer K >= 2.
    std::string cv = "5";
    double calib_fraction = 0.5;

    std::string learner = "ols";
    std::size_t knn_k = 5;

    std::size_t n_bootstraps = 30;
    std::size_t block_length = 1;
    std::string aggregation = "mean";
    std::size_t beta_grid = 100;
    std::size_t lags = 0;
    bool update_residuals = false;
    std::size_t rolling_window = 0;

    int epochs = 500;
    double l2 = 1e-3;
    double temperature = 1.0;

    std::vector<double> alphas{0.1};
    std::uint64_t seed = 0;
    // 0 defers to CONFORMAL_KIT_THREADS / hardware. Never affects output.
    std::size_t threads = 0;

    // synth and bench
    std::string generator = "linear";
    std::string problem = "classification";
    std::size_t n = 500;
    std::size_t d = 2;
    double noise = 1.0;
    int n_classes = 3;
    double separation = 3.0;
    double phi = 0.5;
    double shift = 10.0;
    std::size_t shift_index = 0;  // 0 means n / 2
    std::size_t n_train = 500;
    std::size_t n_calib = 500;
    std::size_t n_test = 500;
    std::size_t trials = 1;

    std::string out;
    OutputFormat format = OutputFormat::json;
};

const char* to_string(Task task);

/// Parses `conformal-kit <task> [flags]`. Throws UsageError on bad input.
RunConfig parse_command_line(const std::vector<std::string>& args);

/// Checks cross-flag constraints (alpha range, method vs task, ...).
void validate(const RunConfig& config);

/// Runs the task and returns the result document:
/// {"config": {...}, "per_alpha": [{"alpha": a, ...}, ...]}.
/// synth returns {"config": {...}} after writing the dataset CSV.
nlohmann::json execute(const RunConfig& config);

/// Serialises a result document as JSON or flat CSV.
std::string render(const nlohmann::json& result, Task task, OutputFormat format);

/// validate + execute + render, writing to config.out (or `out` if empty).
void run(const RunConfig& config, std::ostream& out);

/// Entry point behind main(): returns the process exit code.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conformal::cli
