#pragma once

#include <limits>
#include <vector>

namespace glv {

/// Primal network simplex for min-cost flow with real-valued supplies and
/// capacities: block-search pivots on a strongly feasible spanning tree.
/// Supplies must balance to zero (add a collector node if they do not).
class MinCostFlow {
public:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    explicit MinCostFlow(int num_nodes);

    int add_arc(int tail, int head, double cost, double capacity = kInf);
    void set_supply(int node, double supply);

    enum class Status { NotSolved, Optimal, Infeasible, Unbalanced };
    Status solve();

    double total_cost() const { return total_cost_; }
    double flow(int arc) const { return flow_[arc]; }
    /// Node potential pi; the dual witness is xi = -pi (shift as needed).
    double potential(int node) const { return pi_[node]; }
    int num_arcs() const { return (int)tail_.size(); }
    int arc_tail(int arc) const { return tail_[arc]; }
    int arc_head(int arc) const { return head_[arc]; }
    double arc_cost(int arc) const { return cost_[arc]; }

    /// Largest complementary-slackness violation over all arcs
    /// (reduced-cost optimality certificate; ~0 at a true optimum).
    double max_complementary_violation() const;

private:
    int n_;
    std::vector<int> tail_, head_;
    std::vector<double> cost_, cap_, flow_;
    std::vector<double> supply_;
    std::vector<double> pi_;
    double total_cost_ = 0.0;

    // Spanning tree (LEMON-style arrays); node n_ is the artificial root.
    std::vector<int> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_;
    std::vector<signed char> pred_dir_, state_;
    int search_arc_num_ = 0, all_arc_num_ = 0, root_ = 0;
    int in_arc_ = -1, join_ = -1, u_in_ = -1, v_in_ = -1, u_out_ = -1;
    double delta_ = 0.0;
    signed char change_dir_ = 0;
    int block_size_ = 0, next_arc_ = 0;

    bool find_entering_arc();
    void find_join_node();
    bool find_leaving_arc();
    void change_flow();
    void update_tree_structure();
    void update_potentials();
};

}  // namespace glv
