#ifndef MDPDE_SIMHARNESS_HPP
#define MDPDE_SIMHARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mdpde/estim.hpp"
#include "mdpde/model.hpp"
#include "mdpde/wald.hpp"

namespace mdpde {

// Fixed keeps the contamination fraction at epsilon; Contiguous scales it to
// epsilon/sqrt(n).
enum class ContaminationScaling { Fixed, Contiguous };

struct SimConfig {
    GlmModel model = GlmModel::poisson();
    CovariateDistribution covariate_dist = CovariateDistribution::univariate_normal(0.0, 1.0);
    Eta eta_true;
    long n = 100;
    long replicates = 100;
    std::vector<double> alpha_list{0.0};
    double epsilon = 0.0;
    ContaminationScaling scaling = ContaminationScaling::Fixed;
    std::optional<ContaminationPoint> contamination_point;
    std::optional<LinearHypothesis> hypothesis;
    double level = 0.05;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct AlphaSummary {
    double alpha = 0.0;
    Eigen::VectorXd eta_mean;  // over converged replicates, packed layout
    Eigen::VectorXd eta_sd;
    double rejection_rate = 0.0;
    double rejection_se = 0.0;
    long failures = 0;
    long used = 0;
};

struct SimReport {
    std::vector<AlphaSummary> per_alpha;
};

// One replicate's sample; a point mass replaces the model draw with
// probability epsilon (or epsilon/sqrt(n) under Contiguous scaling). Same
// (config, replicate_index) always yields the identical sample.
Sample generate_sample(const SimConfig& config, std::uint64_t replicate_index);

// Fit every alpha per replicate, test the hypothesis, aggregate rejection
// rates and parameter summaries. Replicates run concurrently; results do not
// depend on the thread count. Throws NonConvergence when more than 1% of
// replicates fail to converge for some alpha.
SimReport run_level_power_study(const SimConfig& config);

// key=value config file format.
SimConfig parse_sim_config(std::istream& in);
SimConfig parse_sim_config_file(const std::string& path);
std::string serialize_sim_config(const SimConfig& config);

// One CSV row per alpha.
std::string report_to_csv(const SimReport& report);

} // namespace mdpde

#endif
