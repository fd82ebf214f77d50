#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sqlrl/corpus.hpp"
#include "sqlrl/rng.hpp"

namespace sqlrl {

struct DecisionNode {
    std::string node_id; // "<family>/<role>"
    std::string family;  // template id this node belongs to
    std::vector<std::string> choices;
};

// Fixed decision-node structure shared by params and reference policy.
class NodeRegistry {
  public:
    static std::shared_ptr<const NodeRegistry> standard();

    explicit NodeRegistry(std::vector<DecisionNode> nodes);

    const std::vector<DecisionNode>& nodes() const { return nodes_; }
    const DecisionNode& node(size_t i) const { return nodes_[i]; }
    size_t size() const { return nodes_.size(); }
    int node_index(const std::string& node_id) const; // -1 if absent
    const std::vector<size_t>& family_nodes(const std::string& family) const;

    nlohmann::json to_json() const;
    static std::shared_ptr<const NodeRegistry> from_json(const nlohmann::json& j);

  private:
    std::vector<DecisionNode> nodes_;
    std::map<std::string, std::vector<size_t>> by_family_;
    std::map<std::string, size_t> by_id_;
};

// gradient / parameter increments share the logits shape
using Grad = std::vector<std::vector<double>>;

Grad zero_like(const Grad& shape);
void axpy(double a, const Grad& x, Grad& y); // y += a*x
double l2_norm(const Grad& g);
double l2_distance(const Grad& a, const Grad& b);

std::vector<double> softmax(const std::vector<double>& logits);

struct PolicyParams {
    std::shared_ptr<const NodeRegistry> registry;
    std::vector<std::vector<double>> logits; // parallel to registry nodes
    std::string version = "v1";

    static PolicyParams uniform(std::shared_ptr<const NodeRegistry> reg);

    std::vector<double> node_probs(size_t node_index) const;

    nlohmann::json to_json() const;
    static PolicyParams from_json(const nlohmann::json& j);
};

// frozen snapshot of the starting parameters
struct ReferencePolicy {
    PolicyParams params;
    static ReferencePolicy snapshot(const PolicyParams& p) { return {p}; }
};

struct Completion {
    std::string sql;
    std::vector<std::pair<size_t, int>> trace; // (node index, chosen option)
    double logprob = 0;
};

enum class DecodeMode { Sample, TopK, Greedy };
std::string decode_mode_name(DecodeMode m);
DecodeMode decode_mode_from_name(const std::string& s);

// deterministic SQL text for a full trace of the question's family
std::string render_sql(const PolicyParams& params,
                       const std::vector<std::pair<size_t, int>>& trace,
                       const QuestionInstance& question);

Completion complete_from_choices(const PolicyParams& params, const QuestionInstance& question,
                                 const std::vector<int>& choices);

// k independent samples from the factorized distribution (duplicates allowed);
// TopK mode instead returns the k most probable traces
std::vector<Completion> sample_group(const PolicyParams& params,
                                     const QuestionInstance& question, int k, Rng& rng,
                                     DecodeMode mode = DecodeMode::Sample);

// per-node argmax, ties broken toward the lowest option index
Completion greedy_completion(const PolicyParams& params, const QuestionInstance& question);

// d logprob / d logits: onehot(chosen) - softmax at each touched node
Grad logprob_grad(const PolicyParams& params, const Completion& completion);

// exact KL over all decision nodes (the policy factorizes over them)
double kl_divergence(const PolicyParams& params, const ReferencePolicy& ref);
Grad kl_grad(const PolicyParams& params, const ReferencePolicy& ref);

} // namespace sqlrl
