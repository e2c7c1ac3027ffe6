#include "mnsga/evaluators.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace mnsga {

SurrogateEvaluator::SurrogateEvaluator(SearchSpaceSpec space, SurrogateParams params)
    : space_(std::move(space)), params_(std::move(params)) {
    if (params_.stage_coefficients.size() !=
        static_cast<std::size_t>(space_.num_searched_stages())) {
        throw std::invalid_argument("need one surrogate coefficient per searched stage");
    }
    for (double c : params_.stage_coefficients) {
        if (c <= 0.0) throw std::invalid_argument("surrogate coefficients must be positive");
    }
}

double surrogate_loss(const SearchSpaceSpec& space, const Genome& genome,
                      const SurrogateParams& params) {
    const auto check = validate(space, genome);
    if (!check.ok()) {
        throw std::invalid_argument("invalid genome: " + check.violations.front().message);
    }
    double capacity = 0.0;
    for (std::size_t s = 0; s < genome.op_genes.size(); ++s) {
        for (OpKind op : genome.op_genes[s]) {
            if (op == OpKind::Identity) continue;
            capacity += params.stage_coefficients[s] * std::log2(1.0 + expansion_of(op));
        }
    }
    return 1.0 / (1.0 + capacity);
}

double SurrogateEvaluator::evaluate(const Genome& genome) const {
    return surrogate_loss(space_, genome, params_);
}

ProxyEvaluator::ProxyEvaluator(SearchSpaceSpec space,
                               std::shared_ptr<const SupernetWeights> supernet)
    : space_(std::move(space)), supernet_(std::move(supernet)) {
    if (!supernet_) throw std::invalid_argument("proxy evaluator needs a supernet");
    if (supernet_->space_hash_value() != space_hash(space_)) {
        throw std::invalid_argument("supernet was built for a different space");
    }
}

double proxy_loss(const SearchSpaceSpec& space, const Genome& genome,
                  const SupernetWeights& supernet) {
    const MappedWeights mapped = map_individual(supernet, space, genome);
    double kept = 0.0;
    double total = 0.0;
    for (const auto& layer : mapped.layers) {
        const auto norms =
            l1_channel_norms(supernet.tensor(layer.stage, layer.slot, layer.op));
        total += std::accumulate(norms.begin(), norms.end(), 0.0);
        for (int idx : layer.out_indices) kept += norms[idx];
    }
    const double score = total > 0.0 ? kept / total : 1.0;
    constexpr double eps = 1e-6;
    return 1.0 - score * (1.0 - eps);
}

double ProxyEvaluator::evaluate(const Genome& genome) const {
    return proxy_loss(space_, genome, *supernet_);
}

}  // namespace mnsga
