#include "wick/chaos2.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "wick/diagram.hpp"

namespace wick {

Chaos2Kernel::Chaos2Kernel(Eigen::MatrixXd matrix, Eigen::VectorXd weights, std::string label)
    : matrix_(std::move(matrix)), weights_(std::move(weights)), label_(std::move(label)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() != weights_.size())
        throw Error("kernel matrix and weight grid sizes disagree");
    if ((weights_.array() <= 0).any())
        throw Error("quadrature weights must be positive");
    double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
    if (asym != 0.0)
        throw Error("kernel matrix must be exactly symmetric; symmetrize first");
    Eigen::VectorXd s = weights_.array().sqrt();
    scaled_ = s.asDiagonal() * matrix_ * s.asDiagonal();
}

double Chaos2Kernel::inner(const Chaos2Kernel& other) const {
    require_same_grid(other);
    return (scaled_.array() * other.scaled_.array()).sum();
}

Chaos2Kernel Chaos2Kernel::rank_one(const Eigen::VectorXd& h, const Eigen::VectorXd& weights,
                                    double scale, std::string label) {
    Eigen::MatrixXd m = scale * (h * h.transpose());
    m = 0.5 * (m + m.transpose()).eval(); // force bitwise symmetry
    return Chaos2Kernel(std::move(m), weights, std::move(label));
}

void Chaos2Kernel::require_same_grid(const Chaos2Kernel& other) const {
    if (size() != other.size())
        throw GridMismatchError("kernel grids differ in size: " + std::to_string(size()) +
                                " vs " + std::to_string(other.size()));
    double scale = std::max(weights_.cwiseAbs().maxCoeff(), 1e-300);
    if ((weights_ - other.weights_).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw GridMismatchError("kernel grids carry different weights");
}

std::string Chaos2Kernel::to_json() const {
    nlohmann::json j;
    j["label"] = label_;
    j["weights"] = std::vector<double>(weights_.data(), weights_.data() + weights_.size());
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < matrix_.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < matrix_.cols(); ++k) row.push_back(matrix_(i, k));
        rows.push_back(row);
    }
    j["matrix"] = rows;
    return j.dump();
}

Chaos2Kernel Chaos2Kernel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    auto wv = j.at("weights").get<std::vector<double>>();
    Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(wv.data(), static_cast<long>(wv.size()));
    auto rows = j.at("matrix");
    Eigen::MatrixXd m(wv.size(), wv.size());
    for (std::size_t i = 0; i < wv.size(); ++i) {
        auto row = rows.at(i).get<std::vector<double>>();
        for (std::size_t k = 0; k < wv.size(); ++k) m(static_cast<long>(i), static_cast<long>(k)) = row[k];
    }
    Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    return Chaos2Kernel(std::move(sym), std::move(w), j.value("label", std::string()));
}

Eigen::MatrixXd operator_apply(const Chaos2Kernel& f, const Chaos2Kernel& g) {
    f.require_same_grid(g);
    return f.matrix() * f.weights().asDiagonal() * g.matrix();
}

Chaos2Kernel symmetrized(const Eigen::MatrixXd& m, const Eigen::VectorXd& weights,
                         std::string label) {
    Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    return Chaos2Kernel(std::move(sym), weights, std::move(label));
}

double trace_chain(const std::vector<const Chaos2Kernel*>& kernels) {
    if (kernels.empty()) throw Error("trace of an empty kernel chain");
    for (std::size_t i = 1; i < kernels.size(); ++i)
        kernels[0]->require_same_grid(*kernels[i]);
    Eigen::MatrixXd prod = kernels[0]->scaled();
    for (std::size_t i = 1; i < kernels.size(); ++i) prod = prod * kernels[i]->scaled();
    return prod.trace();
}

double trace_power(const Chaos2Kernel& f, int m) {
    std::vector<const Chaos2Kernel*> chain(static_cast<std::size_t>(m), &f);
    return trace_chain(chain);
}

double joint_cumulant_trace(const std::vector<Chaos2Kernel>& kernels, int max_m) {
    const int m = static_cast<int>(kernels.size());
    if (m < 2) throw Error("joint_cumulant_trace needs at least two kernels");
    if (m > max_m) throw SizeLimitError(static_cast<std::size_t>(m),
                                        static_cast<std::size_t>(max_m));
    std::vector<int> perm(m - 1);
    std::iota(perm.begin(), perm.end(), 0);
    double sum = 0.0;
    do {
        std::vector<const Chaos2Kernel*> chain;
        chain.reserve(m);
        for (int i : perm) chain.push_back(&kernels[i]);
        chain.push_back(&kernels[m - 1]);
        sum += trace_chain(chain);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::ldexp(sum, m - 1); // 2^{m-1} * sum
}

namespace {

std::string join_word(const std::vector<std::string>& word) {
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i) out += '|';
        out += word[i];
    }
    return out;
}

} // namespace

std::map<std::string, ChaosProductTerm>
chaos2_change_of_chaos_groups(const std::vector<Chaos2Kernel>& kernels) {
    const int m = static_cast<int>(kernels.size());
    for (int i = 1; i < m; ++i) kernels[0].require_same_grid(kernels[i]);

    std::vector<Multiset> rows;
    for (int i = 0; i < m; ++i) {
        Multiset r;
        r.add("k" + std::to_string(i), 2);
        rows.push_back(r);
    }

    DiagramFilter filter;
    filter.non_flat = true;
    filter.connected = true;
    filter.gaussian = true;

    std::map<std::string, ChaosProductTerm> groups;
    enumerate_diagrams(rows, filter, [&](const Diagram& d) {
        if (d.residual.empty()) return; // change of chaos keeps |K| > 0 only
        // Row adjacency from the pair edges. Components are simple paths:
        // a closed cycle would be a residual-free component, which the
        // connectedness requirement excludes here.
        std::vector<std::vector<int>> adj(m);
        for (const auto& e : d.edges) adj[e[0].row].push_back(e[1].row);
        for (const auto& e : d.edges) adj[e[1].row].push_back(e[0].row);

        std::vector<bool> used(m, false);
        std::vector<std::vector<int>> chains;
        for (int r = 0; r < m; ++r) {
            if (used[r] || adj[r].size() > 1) continue;
            // endpoint (degree 0 or 1): walk the path
            std::vector<int> chain{r};
            used[r] = true;
            int cur = r;
            while (true) {
                int next = -1;
                for (int nb : adj[cur])
                    if (!used[nb]) {
                        next = nb;
                        break;
                    }
                if (next < 0) break;
                chain.push_back(next);
                used[next] = true;
                cur = next;
            }
            chains.push_back(std::move(chain));
        }

        // canonicalize each chain by its lexicographically smaller reading
        std::vector<std::pair<std::vector<std::string>, std::vector<int>>> labeled;
        for (auto& chain : chains) {
            std::vector<std::string> word;
            for (int r : chain)
                word.push_back(kernels[r].label().empty() ? "k" + std::to_string(r)
                                                          : kernels[r].label());
            std::vector<std::string> rev(word.rbegin(), word.rend());
            if (rev < word) {
                word = rev;
                std::reverse(chain.begin(), chain.end());
            }
            labeled.emplace_back(std::move(word), chain);
        }
        std::sort(labeled.begin(), labeled.end());

        std::string key;
        for (std::size_t i = 0; i < labeled.size(); ++i) {
            if (i) key += ';';
            key += join_word(labeled[i].first);
        }

        auto [it, inserted] = groups.emplace(key, ChaosProductTerm{});
        ChaosProductTerm& term = it->second;
        term.coefficient += 1.0;
        if (inserted) {
            for (const auto& [word, chain] : labeled) {
                Eigen::MatrixXd factor = kernels[chain[0]].matrix();
                for (std::size_t i = 1; i < chain.size(); ++i)
                    factor = factor * kernels[chain[0]].weights().asDiagonal() *
                             kernels[chain[i]].matrix();
                term.factor_words.push_back(word);
                term.factors.push_back(std::move(factor));
            }
        }
    });
    return groups;
}

Chaos2ChangeOfChaos chaos2_change_of_chaos(const Chaos2Kernel& f, const Chaos2Kernel& g) {
    f.require_same_grid(g);
    Chaos2ChangeOfChaos out;
    out.contraction_terms.push_back(
        {2.0, symmetrized(operator_apply(f, g), f.weights(),
                          "A_" + f.label() + " " + g.label())});
    out.contraction_terms.push_back(
        {2.0, symmetrized(operator_apply(g, f), f.weights(),
                          "A_" + g.label() + " " + f.label())});
    return out;
}

} // namespace wick
