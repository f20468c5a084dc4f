#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "todamt/functional.hpp"
#include "todamt/testfns.hpp"

namespace todamt::cli {

namespace {

namespace pt = boost::property_tree;

std::vector<double> parse_numbers(const std::string& text, const std::string& key) {
    std::string cleaned = text;
    for (char& c : cleaned)
        if (c == ',' || c == ';') c = ' ';
    std::istringstream in(cleaned);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw std::runtime_error("config key " + key + ": cannot parse '" + token + "' as a number");
        }
    }
    return out;
}

// Groups separated by ';' each hold a fixed number of values.
std::vector<std::vector<double>> parse_groups(const std::string& text, const std::string& key, std::size_t width) {
    std::vector<std::vector<double>> out;
    std::istringstream in(text);
    std::string group;
    while (std::getline(in, group, ';')) {
        const auto values = parse_numbers(group, key);
        if (values.empty()) continue;
        if (values.size() != width)
            throw std::runtime_error("config key " + key + ": expected groups of " + std::to_string(width) + " values");
        out.push_back(values);
    }
    return out;
}

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
    const auto node = tree.get_optional<std::string>(key);
    if (!node) return fallback;
    const auto values = parse_numbers(*node, key);
    if (values.size() != 1) throw std::runtime_error("config key " + key + ": expected one number");
    if constexpr (std::is_integral_v<T>) {
        if (values[0] != std::floor(values[0])) throw std::runtime_error("config key " + key + ": expected an integer");
    }
    return static_cast<T>(values[0]);
}

std::vector<double> get_list(const pt::ptree& tree, const std::string& key, std::vector<double> fallback) {
    const auto node = tree.get_optional<std::string>(key);
    return node ? parse_numbers(*node, key) : fallback;
}

std::string init_name(InitKind k) {
    switch (k) {
        case InitKind::zero: return "zero";
        case InitKind::random: return "random";
        case InitKind::bubble: return "bubble";
    }
    return "zero";
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::runtime_error("cannot read config: " + std::string(e.what()));
    }
    ExperimentConfig c;
    c.n = get(tree, "grid.n", c.n);

    if (const auto pts = tree.get_optional<std::string>("singular.points"))
        for (const auto& g : parse_groups(*pts, "singular.points", 2)) c.points.push_back({g[0], g[1]});
    c.alpha1 = get_list(tree, "singular.alpha1", {});
    c.alpha2 = get_list(tree, "singular.alpha2", {});

    const std::string base = tree.get<std::string>("weight.base", "flat");
    if (base == "trig") {
        TrigBase b;
        b.constant = get(tree, "weight.constant", 1.0);
        if (const auto terms = tree.get_optional<std::string>("weight.terms"))
            for (const auto& g : parse_groups(*terms, "weight.terms", 4))
                b.terms.push_back({static_cast<int>(g[0]), static_cast<int>(g[1]), g[2], g[3]});
        c.base = b;
    } else if (base != "flat") {
        throw std::runtime_error("config key weight.base: expected flat or trig");
    }

    const std::string mode = tree.get<std::string>("rho.mode", "fraction");
    if (mode == "absolute")
        c.rho_mode = RhoMode::absolute;
    else if (mode != "fraction")
        throw std::runtime_error("config key rho.mode: expected fraction or absolute");
    c.rho1 = get(tree, "rho.rho1", c.rho1);
    c.rho2 = get(tree, "rho.rho2", c.rho2);

    c.lambdas = get_list(tree, "sweep.lambdas", c.lambdas);

    MinimizeOptions& m = c.minimize;
    m.tolerance = get(tree, "minimize.tolerance", m.tolerance);
    m.max_iterations = get(tree, "minimize.max_iterations", m.max_iterations);
    m.shrink = get(tree, "minimize.shrink", m.shrink);
    m.sufficient_decrease = get(tree, "minimize.sufficient_decrease", m.sufficient_decrease);
    m.max_backtracks = get(tree, "minimize.max_backtracks", m.max_backtracks);
    m.memory = get(tree, "minimize.memory", m.memory);
    m.state_bound = get(tree, "minimize.state_bound", m.state_bound);
    m.drop_bound = get(tree, "minimize.drop_bound", m.drop_bound);
    const std::string init = tree.get<std::string>("minimize.init", "zero");
    if (init == "zero")
        c.init = InitKind::zero;
    else if (init == "random")
        c.init = InitKind::random;
    else if (init == "bubble")
        c.init = InitKind::bubble;
    else
        throw std::runtime_error("config key minimize.init: expected zero, random or bubble");
    c.bubble_lambda = get(tree, "minimize.bubble_lambda", c.bubble_lambda);

    c.path = get_list(tree, "continuation.fractions", c.path);
    c.disk_alphas = get_list(tree, "disk.alphas", c.disk_alphas);
    c.disk_nodes = get(tree, "disk.nodes", c.disk_nodes);
    c.out_dir = tree.get<std::string>("output.dir", c.out_dir);
    c.seed = get<std::uint64_t>(tree, "run.seed", c.seed);
    return c;
}

void ExperimentConfig::validate() const {
    // grid size, exponents and point separation are checked by the library types
    const SurfaceGrid grid = SurfaceGrid::build(n);
    const SingularConfig singular(grid, points, {alpha1, alpha2});
    if (base) base->sample(grid);
    static_cast<void>(RhoParams{rho1, rho2});
    minimize.validate();
    const RhoParams crit = critical_rho(singular);
    if (!lambdas.empty()) {
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            check_bubble(grid, {grid.node(0), lambdas[i], 0.0, 4});
            if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
                throw std::invalid_argument("sweep.lambdas must be strictly increasing");
        }
    }
    check_bubble(grid, {grid.node(0), bubble_lambda, 0.0, 4});
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (!(path[i] > 0.0) || path[i] > 1.0) {
            std::ostringstream msg;
            msg << "continuation.fractions must lie in (0, 1] (got " << path[i] << ", critical rho = (" << crit[0]
                << ", " << crit[1] << "))";
            throw std::invalid_argument(msg.str());
        }
        if (i > 0 && !(path[i] > path[i - 1])) throw std::invalid_argument("continuation.fractions must increase");
    }
    for (double a : disk_alphas)
        if (!(a > -1.0) || a > 0.0) throw std::invalid_argument("disk.alphas must lie in (-1, 0]");
    if (disk_nodes < 2) throw std::invalid_argument("disk.nodes must be at least 2");
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["grid"]["n"] = n;
    nlohmann::json pts = nlohmann::json::array();
    for (const Point& p : points) pts.push_back({p.x, p.y});
    j["singular"] = {{"points", pts}, {"alpha1", alpha1}, {"alpha2", alpha2}};
    if (base) {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& t : base->terms) terms.push_back({t.kx, t.ky, t.cos_coef, t.sin_coef});
        j["weight"] = {{"base", "trig"}, {"constant", base->constant}, {"terms", terms}};
    } else {
        j["weight"] = {{"base", "flat"}};
    }
    j["rho"] = {{"mode", rho_mode == RhoMode::fraction ? "fraction" : "absolute"}, {"rho1", rho1}, {"rho2", rho2}};
    j["sweep"]["lambdas"] = lambdas;
    j["minimize"] = {{"tolerance", minimize.tolerance},
                     {"max_iterations", minimize.max_iterations},
                     {"shrink", minimize.shrink},
                     {"sufficient_decrease", minimize.sufficient_decrease},
                     {"max_backtracks", minimize.max_backtracks},
                     {"memory", minimize.memory},
                     {"state_bound", minimize.state_bound},
                     {"drop_bound", minimize.drop_bound},
                     {"init", init_name(init)},
                     {"bubble_lambda", bubble_lambda}};
    j["continuation"]["fractions"] = path;
    j["disk"] = {{"alphas", disk_alphas}, {"nodes", disk_nodes}};
    j["output"]["dir"] = out_dir;
    j["run"]["seed"] = seed;
    return j;
}

std::string ExperimentConfig::hash() const {
    nlohmann::json j = to_json();
    j.erase("output");  // where files go does not change what they contain
    const std::string text = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Experiment::Experiment(ExperimentConfig cfg)
    : config(std::move(cfg)),
      grid(SurfaceGrid::build(config.n)),
      singular(grid, config.points, {config.alpha1, config.alpha2}),
      w1(build_weight(grid, singular, 0, config.base ? config.base->sample(grid) : Field::constant(grid.size(), 1.0))),
      w2(build_weight(grid, singular, 1, config.base ? config.base->sample(grid) : Field::constant(grid.size(), 1.0))),
      critical(critical_rho(singular)),
      rho(config.rho_mode == RhoMode::fraction ? RhoParams(config.rho1 * critical[0], config.rho2 * critical[1])
                                               : RhoParams(config.rho1, config.rho2)) {}

}  // namespace todamt::cli
