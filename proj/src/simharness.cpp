#include "mdpde/simharness.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "mdpde/csvio.hpp"
#include "mdpde/numerics.hpp"
#include "mdpde/rng.hpp"

namespace mdpde {

void SimConfig::validate() const {
    if (replicates < 1) throw DomainError("sim config: need replicates >= 1");
    if (n < 1) throw DomainError("sim config: need n >= 1");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw DomainError("sim config: epsilon in [0,1)");
    if (epsilon > 0.0 && !contamination_point) {
        throw DomainError("sim config: contamination point required when epsilon > 0");
    }
    if (alpha_list.empty()) throw DomainError("sim config: alpha_list empty");
    if (eta_true.beta.size() != covariate_dist.dim()) {
        throw DomainError("sim config: beta dimension does not match covariate distribution");
    }
    if (!model.dispersion_known() && !eta_true.phi) {
        throw DomainError("sim config: phi required for this family");
    }
    if (!(level > 0.0 && level < 1.0)) throw DomainError("sim config: level in (0,1)");
}

Sample generate_sample(const SimConfig& config, std::uint64_t replicate_index) {
    config.validate();
    CounterRng rng(config.seed, replicate_index);
    const double eps_eff = config.scaling == ContaminationScaling::Fixed
                               ? config.epsilon
                               : config.epsilon / std::sqrt(static_cast<double>(config.n));
    const double phi = config.model.dispersion_known() ? config.model.known_phi()
                                                       : *config.eta_true.phi;
    Sample sample;
    sample.reserve(config.n);
    for (long i = 0; i < config.n; ++i) {
        if (eps_eff > 0.0 && rng.next_uniform() < eps_eff) {
            sample.push_back({config.contamination_point->y, config.contamination_point->x});
            continue;
        }
        Eigen::VectorXd x = config.covariate_dist.sample(rng);
        double lp = x.dot(config.eta_true.beta);
        double y;
        if (config.model.family() == Family::Poisson) {
            y = static_cast<double>(rng.next_poisson(std::exp(lp)));
        } else {
            y = lp + phi * rng.next_normal();
        }
        sample.push_back({y, std::move(x)});
    }
    return sample;
}

namespace {

struct ReplicateResult {
    std::vector<std::uint8_t> rejected;   // per alpha
    std::vector<std::uint8_t> converged;  // per alpha
    std::vector<Eigen::VectorXd> eta;     // per alpha, packed
};

ReplicateResult run_one(const SimConfig& config, std::uint64_t rep) {
    const std::size_t na = config.alpha_list.size();
    ReplicateResult rr;
    rr.rejected.assign(na, 0);
    rr.converged.assign(na, 0);
    rr.eta.assign(na, Eigen::VectorXd());

    Sample sample = generate_sample(config, rep);
    FitOptions base;
    std::optional<Eta> mle_eta;
    for (std::size_t a = 0; a < na; ++a) {
        double alpha = config.alpha_list[a];
        try {
            FitOptions opt = base;
            if (alpha > 0.0 && mle_eta) opt.init = *mle_eta;
            MdpdeFit fit = fit_mdpde(config.model, sample, alpha, opt);
            if (alpha == 0.0) mle_eta = fit.eta_hat;
            if (!fit.converged) continue;
            rr.converged[a] = 1;
            rr.eta[a] = fit.eta_hat.packed();
            if (config.hypothesis) {
                WaldResult w = wald_statistic(fit, *config.hypothesis);
                rr.rejected[a] = w.reject_at(config.level) ? 1 : 0;
            }
        } catch (const std::runtime_error&) {
            // recorded as a failure for this alpha
        }
    }
    return rr;
}

} // namespace

SimReport run_level_power_study(const SimConfig& config) {
    config.validate();
    if (!config.hypothesis) throw DomainError("run_level_power_study: hypothesis required");

    const long reps = config.replicates;
    const std::size_t na = config.alpha_list.size();
    std::vector<ReplicateResult> results(reps);

    int threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (threads > 1 && reps > 1) {
        std::atomic<long> next{0};
        auto worker = [&]() {
            while (true) {
                long i = next.fetch_add(1);
                if (i >= reps) break;
                results[i] = run_one(config, static_cast<std::uint64_t>(i));
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    } else {
        for (long i = 0; i < reps; ++i) {
            results[i] = run_one(config, static_cast<std::uint64_t>(i));
        }
    }

    SimReport report;
    report.per_alpha.resize(na);
    for (std::size_t a = 0; a < na; ++a) {
        AlphaSummary& s = report.per_alpha[a];
        s.alpha = config.alpha_list[a];
        long used = 0, rej = 0;
        Eigen::VectorXd sum, sumsq;
        for (long i = 0; i < reps; ++i) {
            const auto& rr = results[i];
            if (!rr.converged[a]) continue;
            if (used == 0) {
                sum = Eigen::VectorXd::Zero(rr.eta[a].size());
                sumsq = Eigen::VectorXd::Zero(rr.eta[a].size());
            }
            ++used;
            rej += rr.rejected[a];
            sum += rr.eta[a];
            sumsq += rr.eta[a].cwiseProduct(rr.eta[a]);
        }
        s.failures = reps - used;
        s.used = used;
        if (s.failures > 0.01 * static_cast<double>(reps)) {
            std::ostringstream msg;
            msg << "run_level_power_study: " << s.failures << "/" << reps
                << " replicates failed at alpha=" << s.alpha;
            throw NonConvergence(msg.str());
        }
        if (used > 0) {
            s.eta_mean = sum / static_cast<double>(used);
            Eigen::VectorXd var =
                (sumsq / static_cast<double>(used)) - s.eta_mean.cwiseProduct(s.eta_mean);
            s.eta_sd = var.cwiseMax(0.0).cwiseSqrt();
            s.rejection_rate = static_cast<double>(rej) / static_cast<double>(used);
            s.rejection_se = std::sqrt(s.rejection_rate * (1.0 - s.rejection_rate) /
                                       static_cast<double>(used));
        }
    }
    return report;
}

namespace {

std::map<std::string, std::string> read_kv(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto pos = t.find('=');
        if (pos == std::string::npos) {
            throw DomainError("sim config line " + std::to_string(lineno) + ": expected key=value");
        }
        kv[trim(t.substr(0, pos))] = trim(t.substr(pos + 1));
    }
    return kv;
}

} // namespace

SimConfig parse_sim_config(std::istream& in) {
    auto kv = read_kv(in);
    SimConfig cfg;
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };

    if (auto f = get("family")) {
        if (*f == "poisson") cfg.model = GlmModel::poisson();
        else if (*f == "normal") cfg.model = GlmModel::normal_linear();
        else throw DomainError("sim config: unknown family '" + *f + "'");
    }
    Eigen::VectorXd beta = get("beta") ? parse_vector(*get("beta"))
                                       : Eigen::VectorXd::Ones(1);
    cfg.eta_true.beta = beta;
    if (auto p = get("phi")) cfg.eta_true.phi = std::stod(*p);

    double mu = get("covariate_mu") ? std::stod(*get("covariate_mu")) : 0.0;
    double sd = get("covariate_sd") ? std::stod(*get("covariate_sd")) : 1.0;
    if (beta.size() == 1) {
        cfg.covariate_dist = CovariateDistribution::univariate_normal(mu, sd);
    } else {
        cfg.covariate_dist = CovariateDistribution::product_normal(
            Eigen::VectorXd::Constant(beta.size(), mu),
            Eigen::VectorXd::Constant(beta.size(), sd));
    }

    if (auto v = get("n")) cfg.n = std::stol(*v);
    if (auto v = get("replicates")) cfg.replicates = std::stol(*v);
    if (auto v = get("alphas")) {
        Eigen::VectorXd a = parse_vector(*v);
        cfg.alpha_list.assign(a.data(), a.data() + a.size());
    }
    if (auto v = get("epsilon")) cfg.epsilon = std::stod(*v);
    if (auto v = get("scaling")) {
        if (*v == "fixed") cfg.scaling = ContaminationScaling::Fixed;
        else if (*v == "contiguous") cfg.scaling = ContaminationScaling::Contiguous;
        else throw DomainError("sim config: scaling must be fixed or contiguous");
    }
    if (auto y = get("contamination_y")) {
        ContaminationPoint pt;
        pt.y = std::stod(*y);
        pt.x = get("contamination_x") ? parse_vector(*get("contamination_x"))
                                      : Eigen::VectorXd::Zero(beta.size());
        cfg.contamination_point = pt;
    }
    if (auto l = get("L")) {
        LinearHypothesis hyp;
        hyp.L = parse_matrix(*l);
        hyp.l0 = get("l0") ? parse_vector(*get("l0")) : Eigen::VectorXd::Zero(hyp.L.rows());
        cfg.hypothesis = hyp;
    }
    if (auto v = get("level")) cfg.level = std::stod(*v);
    if (auto v = get("seed")) cfg.seed = std::stoull(*v);
    if (auto v = get("threads")) cfg.threads = std::stoi(*v);
    cfg.validate();
    return cfg;
}

SimConfig parse_sim_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file: " + path);
    return parse_sim_config(in);
}

std::string serialize_sim_config(const SimConfig& config) {
    std::ostringstream out;
    out.precision(17);
    out << "family=" << (config.model.family() == Family::Poisson ? "poisson" : "normal")
        << "\n";
    out << "beta=" << format_vector(config.eta_true.beta) << "\n";
    if (config.eta_true.phi) out << "phi=" << *config.eta_true.phi << "\n";
    if (config.covariate_dist.kind() == CovariateDistribution::Kind::UnivariateNormal) {
        out << "covariate_mu=" << config.covariate_dist.normal_mu()(0) << "\n";
        out << "covariate_sd=" << config.covariate_dist.normal_sd()(0) << "\n";
    } else if (config.covariate_dist.kind() == CovariateDistribution::Kind::ProductNormal) {
        out << "covariate_mu=" << config.covariate_dist.normal_mu()(0) << "\n";
        out << "covariate_sd=" << config.covariate_dist.normal_sd()(0) << "\n";
    }
    out << "n=" << config.n << "\n";
    out << "replicates=" << config.replicates << "\n";
    out << "alphas=";
    for (std::size_t i = 0; i < config.alpha_list.size(); ++i) {
        if (i) out << ",";
        out << config.alpha_list[i];
    }
    out << "\n";
    out << "epsilon=" << config.epsilon << "\n";
    out << "scaling=" << (config.scaling == ContaminationScaling::Fixed ? "fixed" : "contiguous")
        << "\n";
    if (config.contamination_point) {
        out << "contamination_y=" << config.contamination_point->y << "\n";
        out << "contamination_x=" << format_vector(config.contamination_point->x) << "\n";
    }
    if (config.hypothesis) {
        out << "L=" << format_matrix(config.hypothesis->L) << "\n";
        out << "l0=" << format_vector(config.hypothesis->l0) << "\n";
    }
    out << "level=" << config.level << "\n";
    out << "seed=" << config.seed << "\n";
    return out.str();
}

std::string report_to_csv(const SimReport& report) {
    std::ostringstream out;
    out << "alpha,used,failures,rejection_rate,rejection_se";
    int p = 0;
    for (const auto& s : report.per_alpha) {
        p = std::max(p, static_cast<int>(s.eta_mean.size()));
    }
    for (int j = 0; j < p; ++j) out << ",eta_mean_" << j;
    for (int j = 0; j < p; ++j) out << ",eta_sd_" << j;
    out << "\n";
    out.precision(10);
    for (const auto& s : report.per_alpha) {
        out << s.alpha << "," << s.used << "," << s.failures << "," << s.rejection_rate << ","
            << s.rejection_se;
        for (int j = 0; j < p; ++j) {
            out << ",";
            if (j < s.eta_mean.size()) out << s.eta_mean(j);
        }
        for (int j = 0; j < p; ++j) {
            out << ",";
            if (j < s.eta_sd.size()) out << s.eta_sd(j);
        }
        out << "\n";
    }
    return out.str();
}

} // namespace mdpde
