#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tjflow/forest.hpp"
#include "tjflow/heatmap.hpp"

namespace tjflow {

struct SplitResult {
    Dataset train;
    Dataset test;
};

/// Seeded uniform permutation; the first round(train_fraction * n) samples
/// form the training set. Throws for fewer than 5 samples.
SplitResult shuffle_split(const Dataset& dataset, double train_fraction, std::uint64_t seed);

struct OriginModels {
    Forest left;
    Forest right;
    DatasetGrid grid;
};

/// Feature rows of a dataset as a matrix (samples x cells).
Matrix feature_matrix(const Dataset& dataset);

/// One forest per origin on targets 100 * frac_left and 100 * frac_right,
/// same features, seeds derived from (params.seed, origin).
OriginModels train_origin_models(const Dataset& train, const ForestParams& params);

/// Per-origin raw predictions clamped to [0, 100] and scaled to sum to
/// 100; (50, 50) when both clamp to zero.
std::pair<double, double> predict_distribution(const OriginModels& models,
                                               std::span<const double> values);

constexpr double kMaxEuclideanError = 141.4213562373095; // sqrt(2 * 100^2)

/// 100 * |y - y_hat|_2 / e_max for percentage pairs; in [0, 100].
double relative_error(std::pair<double, double> y, std::pair<double, double> y_hat);

enum class EvalMode : std::uint8_t { Sim, Exp, Hybrid };

const char* eval_mode_name(EvalMode mode);
EvalMode eval_mode_from_name(const std::string& name);

struct RunResult {
    std::uint64_t seed = 0;
    double mean_error = 0.0;  // percent
    double stdev_error = 0.0; // percent, population
    double oob_r2_left = 0.0;
    double oob_r2_right = 0.0;
    long n_train = 0;
    long n_test = 0;
};

struct EvalReport {
    EvalMode mode = EvalMode::Sim;
    std::vector<RunResult> runs;
};

/// The evaluation protocol. Sim/Exp: train_source is split 80/20 per run
/// (test_source must be the same dataset). Hybrid: per run the models are
/// trained on a fresh 80% shuffle of train_source and tested on the full
/// test_source. Run r uses seed base_seed + r. Grid metadata of the two
/// sources must match.
EvalReport run_experiment(EvalMode mode, const Dataset& train_source,
                          const Dataset& test_source, int n_runs, std::uint64_t base_seed,
                          const ForestParams& forest_params);

/// CSV: mode,run,seed,n_train,n_test,mean_error,stdev_error,oob_r2_left,oob_r2_right
void write_report_csv(std::ostream& out, const EvalReport& report);
EvalReport read_report_csv(std::istream& in);

/// Two-row table (mean/stdev per run) formatted like the reference tables.
std::string format_report_table(const EvalReport& report);

} // namespace tjflow
