#include "glv/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace glv {

namespace {
constexpr signed char STATE_TREE = 0, STATE_LOWER = 1, STATE_UPPER = -1;
constexpr double kZeroTol = 1e-11;
constexpr double kPivotEps = 1e-11;
}  // namespace

MinCostFlow::MinCostFlow(int num_nodes) : n_(num_nodes), supply_(num_nodes, 0.0) {}

int MinCostFlow::add_arc(int tail, int head, double cost, double capacity) {
    if (tail < 0 || tail >= n_ || head < 0 || head >= n_ || tail == head)
        throw std::invalid_argument("MinCostFlow: bad arc endpoints");
    if (cost < 0) throw std::invalid_argument("MinCostFlow: negative costs unsupported");
    tail_.push_back(tail);
    head_.push_back(head);
    cost_.push_back(cost);
    cap_.push_back(capacity);
    return (int)tail_.size() - 1;
}

void MinCostFlow::set_supply(int node, double supply) { supply_[node] = supply; }

MinCostFlow::Status MinCostFlow::solve() {
    double total_supply = 0.0, abs_supply = 0.0;
    for (double b : supply_) {
        total_supply += b;
        abs_supply += std::abs(b);
    }
    if (std::abs(total_supply) > 1e-7 * std::max(1.0, abs_supply)) return Status::Unbalanced;

    root_ = n_;
    search_arc_num_ = (int)tail_.size();
    all_arc_num_ = search_arc_num_ + n_;

    double art_cost = 1.0;
    for (int e = 0; e < search_arc_num_; ++e) art_cost = std::max(art_cost, cost_[e]);
    art_cost = (art_cost + 1.0) * (double)(n_ + 1);

    flow_.assign(all_arc_num_, 0.0);
    state_.assign(all_arc_num_, STATE_LOWER);
    pi_.assign(n_ + 1, 0.0);
    parent_.assign(n_ + 1, -1);
    pred_.assign(n_ + 1, -1);
    pred_dir_.assign(n_ + 1, 0);  // 1 = forward (node is tail of pred arc)
    thread_.assign(n_ + 1, 0);
    rev_thread_.assign(n_ + 1, 0);
    succ_num_.assign(n_ + 1, 1);
    last_succ_.assign(n_ + 1, 0);

    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = n_ + 1;
    last_succ_[root_] = root_ - 1;

    for (int u = 0, e = search_arc_num_; u < n_; ++u, ++e) {
        parent_[u] = root_;
        pred_[u] = e;
        thread_[u] = u + 1;
        if (u + 1 < n_) rev_thread_[u + 1] = u;
        succ_num_[u] = 1;
        last_succ_[u] = u;
        state_[e] = STATE_TREE;
        cap_.push_back(kInf);
        if (supply_[u] >= 0) {
            pred_dir_[u] = 1;  // u -> root
            tail_.push_back(u);
            head_.push_back(root_);
            pi_[u] = 0.0;
            cost_.push_back(0.0);
            flow_[e] = supply_[u];
        } else {
            pred_dir_[u] = 0;  // root -> u
            tail_.push_back(root_);
            head_.push_back(u);
            pi_[u] = art_cost;
            cost_.push_back(art_cost);
            flow_[e] = -supply_[u];
        }
    }
    thread_[n_ - 1] = root_;
    rev_thread_[root_] = n_ - 1;
    pi_[root_] = 0.0;

    block_size_ = std::max((int)(std::sqrt((double)search_arc_num_)), 10);
    next_arc_ = 0;

    while (find_entering_arc()) {
        find_join_node();
        bool change = find_leaving_arc();
        change_flow();
        if (change) {
            update_tree_structure();
            update_potentials();
        }
    }

    for (int e = search_arc_num_; e < all_arc_num_; ++e) {
        if (flow_[e] > 1e-7) return Status::Infeasible;
        flow_[e] = 0.0;
    }
    total_cost_ = 0.0;
    for (int e = 0; e < search_arc_num_; ++e) total_cost_ += flow_[e] * cost_[e];
    return Status::Optimal;
}

bool MinCostFlow::find_entering_arc() {
    double min = 0.0;
    int cnt = block_size_;
    int e = next_arc_;
    in_arc_ = -1;
    for (int ind = 0; ind < search_arc_num_; ++ind, ++e) {
        if (e >= search_arc_num_) e -= search_arc_num_;
        double c = state_[e] * (cost_[e] + pi_[tail_[e]] - pi_[head_[e]]);
        if (c < min) {
            min = c;
            in_arc_ = e;
        }
        if (--cnt == 0) {
            if (in_arc_ >= 0) {
                double a = std::max({std::abs(pi_[tail_[in_arc_]]),
                                     std::abs(pi_[head_[in_arc_]]), std::abs(cost_[in_arc_])});
                if (min < -kPivotEps * std::max(a, 1.0)) {
                    next_arc_ = e;
                    return true;
                }
            }
            cnt = block_size_;
        }
    }
    if (in_arc_ < 0) return false;
    double a = std::max({std::abs(pi_[tail_[in_arc_]]), std::abs(pi_[head_[in_arc_]]),
                         std::abs(cost_[in_arc_])});
    if (min < -kPivotEps * std::max(a, 1.0)) {
        next_arc_ = in_arc_ + 1 == search_arc_num_ ? 0 : in_arc_ + 1;
        return true;
    }
    return false;
}

void MinCostFlow::find_join_node() {
    int u = tail_[in_arc_], v = head_[in_arc_];
    while (u != v) {
        if (succ_num_[u] < succ_num_[v])
            u = parent_[u];
        else
            v = parent_[v];
    }
    join_ = u;
}

bool MinCostFlow::find_leaving_arc() {
    int first, second;
    if (state_[in_arc_] == STATE_LOWER) {
        first = tail_[in_arc_];
        second = head_[in_arc_];
    } else {
        first = head_[in_arc_];
        second = tail_[in_arc_];
    }
    delta_ = cap_[in_arc_];
    char result = 0;

    // Along the cycle the flow increases from first toward second; forward
    // tree arcs on the first path drain, backward ones fill (and dually on
    // the second path), so the residual picks flow or cap - flow.
    for (int u = first; u != join_; u = parent_[u]) {
        int e = pred_[u];
        double d = pred_dir_[u] ? flow_[e] : (cap_[e] == kInf ? kInf : cap_[e] - flow_[e]);
        if (d < delta_) {
            delta_ = d;
            u_out_ = u;
            result = 1;
        }
    }
    for (int u = second; u != join_; u = parent_[u]) {
        int e = pred_[u];
        double d = pred_dir_[u] ? (cap_[e] == kInf ? kInf : cap_[e] - flow_[e]) : flow_[e];
        if (d <= delta_) {
            delta_ = d;
            u_out_ = u;
            result = 2;
        }
    }
    if (result == 1) {
        u_in_ = first;
        v_in_ = second;
    } else {
        u_in_ = second;
        v_in_ = first;
    }
    change_dir_ = result;
    return result != 0;
}

void MinCostFlow::change_flow() {
    bool change = change_dir_ != 0;
    if (delta_ > 0) {
        double val = state_[in_arc_] * delta_;
        flow_[in_arc_] += val;
        for (int u = tail_[in_arc_]; u != join_; u = parent_[u])
            flow_[pred_[u]] += pred_dir_[u] ? -val : val;
        for (int u = head_[in_arc_]; u != join_; u = parent_[u])
            flow_[pred_[u]] += pred_dir_[u] ? val : -val;
    }
    if (change) {
        state_[in_arc_] = STATE_TREE;
        state_[pred_[u_out_]] = (flow_[pred_[u_out_]] <= kZeroTol) ? STATE_LOWER : STATE_UPPER;
        if (flow_[pred_[u_out_]] <= kZeroTol) flow_[pred_[u_out_]] = 0.0;
    } else {
        state_[in_arc_] = (signed char)-state_[in_arc_];
    }
}

void MinCostFlow::update_tree_structure() {
    int u = last_succ_[u_in_];
    int old_rev_thread = rev_thread_[u_out_];
    int old_succ_num = succ_num_[u_out_];
    int old_last_succ = last_succ_[u_out_];
    int v_out = parent_[u_out_];
    int right = thread_[u];
    int last = (old_rev_thread == v_in_) ? thread_[last_succ_[u_out_]] : thread_[v_in_];

    static thread_local std::vector<int> dirty_revs;
    dirty_revs.clear();

    int stem = u_in_;
    int par_stem = v_in_;
    thread_[v_in_] = u_in_;
    dirty_revs.push_back(v_in_);
    while (stem != u_out_) {
        int new_stem = parent_[stem];
        thread_[u] = new_stem;
        dirty_revs.push_back(u);

        int w = rev_thread_[stem];
        thread_[w] = right;
        rev_thread_[right] = w;

        parent_[stem] = par_stem;
        par_stem = stem;
        stem = new_stem;

        u = (last_succ_[stem] == last_succ_[par_stem]) ? rev_thread_[par_stem]
                                                       : last_succ_[stem];
        right = thread_[u];
    }
    parent_[u_out_] = par_stem;
    thread_[u] = last;
    rev_thread_[last] = last_succ_[u_out_] = u;

    if (old_rev_thread != v_in_) {
        thread_[old_rev_thread] = right;
        rev_thread_[right] = old_rev_thread;
    }
    for (int w : dirty_revs) rev_thread_[thread_[w]] = w;

    // pred / direction / succ counts along the reversed stem.
    int tmp_sc = 0, tmp_ls = last_succ_[u_out_];
    int x = u_out_;
    while (x != u_in_) {
        int w = parent_[x];
        pred_[x] = pred_[w];
        pred_dir_[x] = (signed char)!pred_dir_[w];
        tmp_sc += succ_num_[x] - succ_num_[w];
        succ_num_[x] = tmp_sc;
        last_succ_[w] = tmp_ls;
        x = w;
    }
    pred_[u_in_] = in_arc_;
    pred_dir_[u_in_] = (u_in_ == tail_[in_arc_]) ? 1 : 0;
    succ_num_[u_in_] = old_succ_num;

    int up_limit_in = -1, up_limit_out = -1;
    if (last_succ_[join_] == v_in_)
        up_limit_out = join_;
    else
        up_limit_in = join_;

    for (int w = v_in_; w != up_limit_in && last_succ_[w] == v_in_; w = parent_[w])
        last_succ_[w] = last_succ_[u_out_];

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
        for (int w = v_out; w != up_limit_out && last_succ_[w] == old_last_succ;
             w = parent_[w])
            last_succ_[w] = old_rev_thread;
    } else {
        for (int w = v_out; w != up_limit_out && last_succ_[w] == old_last_succ;
             w = parent_[w])
            last_succ_[w] = last_succ_[u_out_];
    }

    for (int w = v_in_; w != join_; w = parent_[w]) succ_num_[w] += old_succ_num;
    for (int w = v_out; w != join_; w = parent_[w]) succ_num_[w] -= old_succ_num;
}

void MinCostFlow::update_potentials() {
    double sigma = pred_dir_[u_in_] ? pi_[v_in_] - pi_[u_in_] - cost_[pred_[u_in_]]
                                    : pi_[v_in_] - pi_[u_in_] + cost_[pred_[u_in_]];
    int end = thread_[last_succ_[u_in_]];
    for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
}

double MinCostFlow::max_complementary_violation() const {
    double worst = 0.0;
    for (int e = 0; e < search_arc_num_; ++e) {
        double rc = cost_[e] + pi_[tail_[e]] - pi_[head_[e]];
        bool at_lower = flow_[e] <= kZeroTol;
        bool at_upper = cap_[e] < kInf && flow_[e] >= cap_[e] - kZeroTol;
        if (at_lower && rc < 0) worst = std::max(worst, -rc);
        if (at_upper && rc > 0 && !at_lower) worst = std::max(worst, rc);
        if (!at_lower && !at_upper) worst = std::max(worst, std::abs(rc));
    }
    return worst;
}

}  // namespace glv
