#include "mobility/solver.hpp"

#include <algorithm>
#include <queue>
#include <string>
#include <thread>

namespace mobility::solver {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Guard against float rounding when comparing an additive bound with an
// incumbent objective; never prunes an exact tie.
constexpr double kPruneMargin = 1e-9;
constexpr double kEnumerationBound = 1e6;

}  // namespace

SubclassContext::SubclassContext(const std::vector<TravelerId>& subclass,
                                 const Scenario& scenario, const PlannerConfig& config) {
    if (subclass.empty()) throw ValidationError("subclass must be non-empty");
    members_ = subclass;
    std::sort(members_.begin(), members_.end());

    const auto& first = scenario.traveler(members_.front());
    for (TravelerId id : members_) {
        const auto& t = scenario.traveler(id);
        if (t.origin != first.origin || t.destination != first.destination)
            throw ValidationError("subclass members must share one origin-destination pair");
    }

    menu_ = network::feasible_services(first, scenario);
    equity_enabled_ = config.equity_enabled();
    equity_gmax_ = config.equity_gmax;

    std::vector<double> taus;
    for (ServiceId sid : menu_) {
        capacities_.push_back(scenario.service(sid).capacity);
        taus.push_back(network::base_travel_time(scenario, sid, first.origin, first.destination));
    }

    const int n = member_count();
    costs_.resize(n);
    phis_.resize(n);
    for (int i = 0; i < n; ++i) {
        const auto& t = scenario.traveler(members_[i]);
        costs_[i].resize(menu_.size());
        phis_[i].resize(menu_.size());
        for (std::size_t j = 0; j < menu_.size(); ++j) {
            const auto& service = scenario.service(menu_[j]);
            costs_[i][j].resize(n);
            phis_[i][j].resize(n);
            for (int psi = 0; psi < n; ++psi) {
                const double theta_tilde =
                    taus[j] * (1.0 + service.congestion_slope * static_cast<double>(psi) /
                                         static_cast<double>(service.capacity));
                const double phi = market::inconvenience(
                    t.preferences, t.max_willingness_to_pay, theta_tilde, psi, menu_[j],
                    config.co_traveler_penalty);
                phis_[i][j][psi] = phi;
                costs_[i][j][psi] =
                    config.omega1 * phi + config.omega2 * service.per_traveler_cost;
            }
        }
    }
}

double SubclassContext::evaluate(const std::vector<int>& choice) const {
    std::vector<int> count(menu_.size(), 0);
    for (int j : choice) ++count[j];
    double total = 0.0;
    for (std::size_t i = 0; i < choice.size(); ++i)
        total += costs_[i][choice[i]][count[choice[i]] - 1];
    return total;
}

bool SubclassContext::capacity_ok(const std::vector<int>& choice) const {
    std::vector<int> count(menu_.size(), 0);
    for (int j : choice) ++count[j];
    for (std::size_t j = 0; j < menu_.size(); ++j)
        if (count[j] > capacities_[j]) return false;
    return true;
}

bool SubclassContext::equity_ok(const std::vector<int>& choice) const {
    if (!equity_enabled_) return true;
    std::vector<int> count(menu_.size(), 0);
    for (int j : choice) ++count[j];
    std::vector<double> phi(choice.size());
    for (std::size_t i = 0; i < choice.size(); ++i)
        phi[i] = phis_[i][choice[i]][count[choice[i]] - 1];
    return market::gini(phi) <= equity_gmax_;
}

double SubclassContext::partial_lower_bound(const std::vector<int>& prefix) const {
    std::vector<int> count(menu_.size(), 0);
    for (int j : prefix) ++count[j];
    double bound = 0.0;
    // Decided members priced at their current co-occupancy; future joiners
    // can only raise it.
    for (std::size_t i = 0; i < prefix.size(); ++i)
        bound += costs_[i][prefix[i]][count[prefix[i]] - 1];
    // Undecided members priced at the cheapest service they could still
    // join, at the occupancy they would find right now.
    for (int i = static_cast<int>(prefix.size()); i < member_count(); ++i) {
        double best = kInf;
        for (std::size_t j = 0; j < menu_.size(); ++j) {
            if (count[j] >= capacities_[j]) continue;
            best = std::min(best, costs_[i][j][count[j]]);
        }
        bound += best;  // fallback capacity covers everyone, so best < inf
    }
    return bound;
}

Assignment SubclassContext::to_assignment(const std::vector<int>& choice) const {
    Assignment a;
    a.travelers = members_;
    a.services.reserve(choice.size());
    for (int j : choice) a.services.push_back(menu_[j]);
    return a;
}

namespace {

struct Incumbent {
    double objective = kInf;
    std::vector<int> choice;
    bool found = false;

    // Strict improvement, or an exact tie broken toward the
    // lexicographically smaller assignment.
    void offer(double value, const std::vector<int>& candidate) {
        if (!found || value < objective ||
            (value == objective && candidate < choice)) {
            objective = value;
            choice = candidate;
            found = true;
        }
    }
};

SolveResult finish(const SubclassContext& ctx, const Incumbent& inc, long explored,
                   double root_bound) {
    SolveResult result;
    result.explored_nodes = explored;
    result.root_lower_bound = root_bound;
    if (inc.found) {
        result.status = SolveStatus::optimal;
        result.objective = inc.objective;
        result.assignment = ctx.to_assignment(inc.choice);
    }
    return result;
}

}  // namespace

SolveResult solve_subclass(const std::vector<TravelerId>& subclass, const Scenario& scenario,
                           const PlannerConfig& config) {
    SubclassContext ctx(subclass, scenario, config);
    const int n = ctx.member_count();
    const int m = ctx.menu_size();

    struct Node {
        double bound;
        std::vector<int> prefix;
    };
    struct NodeOrder {
        // Priority queue pops the node with the smallest bound; ties prefer
        // deeper prefixes, then lexicographic order, keeping the search
        // fully deterministic.
        bool operator()(const Node& a, const Node& b) const {
            if (a.bound != b.bound) return a.bound > b.bound;
            if (a.prefix.size() != b.prefix.size()) return a.prefix.size() < b.prefix.size();
            return a.prefix > b.prefix;
        }
    };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> frontier;
    const double root_bound = ctx.partial_lower_bound({});
    frontier.push({root_bound, {}});

    Incumbent incumbent;
    long explored = 0;
    std::vector<int> count(m, 0);
    while (!frontier.empty()) {
        Node node = frontier.top();
        frontier.pop();
        if (incumbent.found && node.bound > incumbent.objective + kPruneMargin) continue;
        ++explored;

        std::fill(count.begin(), count.end(), 0);
        for (int j : node.prefix) ++count[j];
        const int depth = static_cast<int>(node.prefix.size());
        for (int j = 0; j < m; ++j) {
            if (count[j] >= ctx.capacity(j)) continue;
            std::vector<int> child = node.prefix;
            child.push_back(j);
            if (depth + 1 == n) {
                if (!ctx.equity_ok(child)) continue;
                incumbent.offer(ctx.evaluate(child), child);
            } else {
                const double bound = ctx.partial_lower_bound(child);
                if (incumbent.found && bound > incumbent.objective + kPruneMargin) continue;
                frontier.push({bound, std::move(child)});
            }
        }
    }
    return finish(ctx, incumbent, explored, root_bound);
}

SolveResult brute_force_solve(const std::vector<TravelerId>& subclass,
                              const Scenario& scenario, const PlannerConfig& config) {
    SubclassContext ctx(subclass, scenario, config);
    const int n = ctx.member_count();
    const int m = ctx.menu_size();

    double candidates = 1.0;
    for (int i = 0; i < n; ++i) candidates *= static_cast<double>(m);
    if (candidates > kEnumerationBound)
        throw InstanceTooLargeError(
            "brute-force enumeration of " + std::to_string(candidates) +
            " assignments exceeds the supported bound of 1e6");

    Incumbent incumbent;
    long visited = 0;
    std::vector<int> choice(n, 0);
    while (true) {
        ++visited;
        if (ctx.capacity_ok(choice) && ctx.equity_ok(choice))
            incumbent.offer(ctx.evaluate(choice), choice);
        // Odometer increment with the last member fastest: visits
        // assignments in lexicographic order.
        int pos = n - 1;
        while (pos >= 0 && choice[pos] == m - 1) {
            choice[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++choice[pos];
    }
    return finish(ctx, incumbent, visited, ctx.partial_lower_bound({}));
}

std::vector<SolveResult> solve_all(const Scenario& scenario, const PlannerConfig& config,
                                   int workers) {
    const auto partition = network::partition_subclasses(scenario.travelers);
    std::vector<SolveResult> results(partition.subclasses.size());

    auto run = [&](std::size_t k) {
        try {
            results[k] = solve_subclass(partition.subclasses[k], scenario, config);
        } catch (const Error& e) {
            throw Error("subclass " + std::to_string(k) + ": " + e.what());
        }
    };

    if (workers <= 1 || partition.subclasses.size() <= 1) {
        for (std::size_t k = 0; k < partition.subclasses.size(); ++k) run(k);
        return results;
    }

    std::vector<std::exception_ptr> failures(partition.subclasses.size());
    std::vector<std::thread> pool;
    const std::size_t total = partition.subclasses.size();
    for (int w = 0; w < workers && w < static_cast<int>(total); ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t k = static_cast<std::size_t>(w); k < total;
                 k += static_cast<std::size_t>(workers)) {
                try {
                    run(k);
                } catch (...) {
                    failures[k] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    return results;
}

}  // namespace mobility::solver
