#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "mdpde/csvio.hpp"
#include "mdpde/estim.hpp"
#include "mdpde/robust.hpp"
#include "mdpde/simharness.hpp"
#include "mdpde/tables.hpp"
#include "mdpde/wald.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNonConvergence = 2;

mdpde::GlmModel pick_family(const std::string& name) {
    if (name == "poisson") return mdpde::GlmModel::poisson();
    if (name == "normal") return mdpde::GlmModel::normal_linear();
    throw mdpde::DomainError("unknown family '" + name + "' (use poisson or normal)");
}

std::vector<std::string> split_names(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct FitArgs {
    std::string csv_path;
    std::string family = "poisson";
    double alpha = 0.0;
    std::string y_col = "y";
    std::string x_cols;
    bool record = false;
    bool quiet = false;
};

void print_fit(const mdpde::MdpdeFit& fit, const std::vector<std::string>& names,
               bool record, std::ostream& out) {
    const auto& eta = fit.eta_hat.packed();
    const long n = fit.n_obs;
    if (record) {
        out << "alpha=" << fit.alpha << "\n";
        out << "converged=" << (fit.converged ? 1 : 0) << "\n";
        out << "iterations=" << fit.iterations << "\n";
        out << "gradient_norm=" << fit.gradient_norm << "\n";
        out << "n=" << n << "\n";
        for (int j = 0; j < eta.size(); ++j) {
            out << "coef_" << names[j] << "=" << eta(j) << "\n";
            out << "se_" << names[j] << "=" << std::sqrt(fit.sandwich.Sigma(j, j) / n) << "\n";
        }
        return;
    }
    out << "MDPDE fit (alpha = " << fit.alpha << ", n = " << n << ")\n";
    out << "converged: " << (fit.converged ? "yes" : "no") << " in " << fit.iterations
        << " iterations, residual " << fit.gradient_norm << "\n";
    out << "  coefficient        estimate       std.error\n";
    for (int j = 0; j < eta.size(); ++j) {
        out << "  ";
        out.width(16);
        out << std::left << names[j];
        out.width(16);
        out << std::left << eta(j);
        out << std::sqrt(fit.sandwich.Sigma(j, j) / n) << "\n";
    }
}

std::vector<std::string> coef_names(const mdpde::Dataset& ds, const mdpde::GlmModel& model) {
    std::vector<std::string> names = ds.x_columns;
    if (!model.dispersion_known()) names.push_back("phi");
    return names;
}

int cmd_fit(const FitArgs& args) {
    auto model = pick_family(args.family);
    if (args.alpha < 0.0) throw mdpde::DomainError("alpha must be nonnegative");
    auto ds = mdpde::load_csv(args.csv_path, args.y_col, split_names(args.x_cols));
    auto fit = mdpde::fit_mdpde(model, ds.observations, args.alpha);
    if (!args.quiet) print_fit(fit, coef_names(ds, model), args.record, std::cout);
    return fit.converged ? kExitOk : kExitNonConvergence;
}

struct TestArgs {
    FitArgs fit;
    std::string L;
    std::string l0;
    double level = 0.05;
};

int cmd_test(const TestArgs& args) {
    auto model = pick_family(args.fit.family);
    if (args.fit.alpha < 0.0) throw mdpde::DomainError("alpha must be nonnegative");
    auto ds = mdpde::load_csv(args.fit.csv_path, args.fit.y_col, split_names(args.fit.x_cols));
    auto fit = mdpde::fit_mdpde(model, ds.observations, args.fit.alpha);
    if (!fit.converged) {
        std::cerr << "fit did not converge\n";
        return kExitNonConvergence;
    }
    mdpde::LinearHypothesis hyp;
    hyp.L = mdpde::parse_matrix(args.L);
    hyp.l0 = mdpde::parse_vector(args.l0);
    auto res = mdpde::wald_statistic(fit, hyp);
    bool reject = res.reject_at(args.level);
    if (!args.fit.quiet) {
        if (args.fit.record) {
            std::cout << "statistic=" << res.statistic << "\n";
            std::cout << "df=" << res.df << "\n";
            std::cout << "p_value=" << res.p_value << "\n";
            std::cout << "level=" << args.level << "\n";
            std::cout << "reject=" << (reject ? 1 : 0) << "\n";
        } else {
            std::cout << "Wald-type test of L beta = l0 (alpha = " << fit.alpha << ")\n";
            std::cout << "  statistic = " << res.statistic << ", df = " << res.df
                      << ", p-value = " << res.p_value << "\n";
            std::cout << "  decision at level " << args.level << ": "
                      << (reject ? "reject" : "do not reject") << "\n";
        }
    }
    return kExitOk;
}

struct IfGridArgs {
    std::string which = "estimator";
    double alpha = 0.0;
    double beta0 = 1.0;
    double mu_x = 0.0;
    double sd_x = 1.0;
    double d = 1.0;
    double level = 0.05;
    std::string out_path;
};

int cmd_ifgrid(const IfGridArgs& args) {
    auto model = mdpde::GlmModel::poisson();
    auto dist = mdpde::CovariateDistribution::univariate_normal(args.mu_x, args.sd_x);
    mdpde::Eta eta{Eigen::VectorXd::Constant(1, args.beta0), std::nullopt};

    mdpde::IfKind kind;
    if (args.which == "estimator") kind = mdpde::IfKind::Estimator;
    else if (args.which == "if2") kind = mdpde::IfKind::SecondOrderTest;
    else if (args.which == "pif") kind = mdpde::IfKind::Power;
    else throw mdpde::DomainError("ifgrid --which must be estimator, if2 or pif");

    std::optional<mdpde::TestGridParams> params;
    if (kind != mdpde::IfKind::Estimator) {
        mdpde::TestGridParams p;
        p.hypothesis.L = Eigen::MatrixXd::Identity(1, 1);
        p.hypothesis.l0 = Eigen::VectorXd::Constant(1, args.beta0);
        p.d = Eigen::VectorXd::Constant(1, args.d);
        p.level = args.level;
        params = std::move(p);
    }
    auto grid = mdpde::if_grid_scan(model, dist, eta, args.alpha, kind, mdpde::figure_grid(),
                                    params);
    mdpde::write_text_file(args.out_path, mdpde::ifgrid_csv(grid));
    std::cout << "sup_abs=" << grid.sup_abs << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum density power divergence estimation and Wald-type tests for GLMs"};
    app.require_subcommand(1);

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Fit an MDPDE from a CSV file");
    fit_cmd->add_option("--csv", fit_args.csv_path, "input CSV path")->required();
    fit_cmd->add_option("--family", fit_args.family, "poisson|normal");
    fit_cmd->add_option("--alpha", fit_args.alpha, "divergence tuning parameter");
    fit_cmd->add_option("--y-col", fit_args.y_col, "response column name");
    fit_cmd->add_option("--x-cols", fit_args.x_cols, "comma-separated covariate columns");
    fit_cmd->add_flag("--record", fit_args.record, "key=value output");
    fit_cmd->add_flag("--quiet", fit_args.quiet, "suppress output");

    TestArgs test_args;
    auto* test_cmd = app.add_subcommand("test", "Fit, then run a Wald-type test");
    test_cmd->add_option("--csv", test_args.fit.csv_path, "input CSV path")->required();
    test_cmd->add_option("--family", test_args.fit.family, "poisson|normal");
    test_cmd->add_option("--alpha", test_args.fit.alpha, "divergence tuning parameter");
    test_cmd->add_option("--y-col", test_args.fit.y_col, "response column name");
    test_cmd->add_option("--x-cols", test_args.fit.x_cols, "covariate columns");
    test_cmd->add_option("--L", test_args.L, "restriction matrix, rows ';'-separated")
        ->required();
    test_cmd->add_option("--l0", test_args.l0, "restriction target vector")->required();
    test_cmd->add_option("--level", test_args.level, "test level");
    test_cmd->add_flag("--record", test_args.fit.record, "key=value output");
    test_cmd->add_flag("--quiet", test_args.fit.quiet, "suppress output");

    std::string table_which, table_out;
    auto* table_cmd = app.add_subcommand("table", "Reproduce the efficiency/power tables");
    table_cmd->add_option("which", table_which, "ARE|ContiguousPower")->required();
    table_cmd->add_option("--out", table_out, "output CSV path")->required();

    IfGridArgs ifgrid_args;
    auto* ifgrid_cmd = app.add_subcommand("ifgrid", "Influence surfaces on the figure grid");
    ifgrid_cmd->add_option("--which", ifgrid_args.which, "estimator|if2|pif");
    ifgrid_cmd->add_option("--alpha", ifgrid_args.alpha, "divergence tuning parameter");
    ifgrid_cmd->add_option("--beta0", ifgrid_args.beta0, "true parameter");
    ifgrid_cmd->add_option("--mu-x", ifgrid_args.mu_x, "covariate mean");
    ifgrid_cmd->add_option("--sd-x", ifgrid_args.sd_x, "covariate sd");
    ifgrid_cmd->add_option("--d", ifgrid_args.d, "contiguous shift (pif)");
    ifgrid_cmd->add_option("--level", ifgrid_args.level, "test level (pif)");
    ifgrid_cmd->add_option("--out", ifgrid_args.out_path, "output CSV path")->required();

    std::string sim_config, sim_out;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a level/power study from a config file");
    sim_cmd->add_option("--config", sim_config, "key=value config file")->required();
    sim_cmd->add_option("--out", sim_out, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit_cmd) return cmd_fit(fit_args);
        if (*test_cmd) return cmd_test(test_args);
        if (*table_cmd) {
            std::string content;
            if (table_which == "ARE") {
                content = mdpde::are_table_csv();
            } else if (table_which == "ContiguousPower") {
                content = mdpde::contiguous_power_table_csv();
            } else {
                std::cerr << "table: which must be ARE or ContiguousPower\n";
                return kExitInput;
            }
            mdpde::write_text_file(table_out, content);
            return kExitOk;
        }
        if (*ifgrid_cmd) return cmd_ifgrid(ifgrid_args);
        if (*sim_cmd) {
            auto cfg = mdpde::parse_sim_config_file(sim_config);
            auto report = mdpde::run_level_power_study(cfg);
            mdpde::write_text_file(sim_out, mdpde::report_to_csv(report));
            return kExitOk;
        }
    } catch (const mdpde::NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
