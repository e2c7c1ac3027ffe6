#ifndef MNSGA_EVALUATORS_HPP
#define MNSGA_EVALUATORS_HPP

#include <memory>
#include <string>
#include <vector>

#include "mnsga/search_space.hpp"
#include "mnsga/weight_mapping.hpp"

namespace mnsga {

// Pluggable pseudo-loss provider. Implementations must be pure: equal
// genomes yield equal losses, and the loss is finite in (0, 1].
class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual double evaluate(const Genome& genome) const = 0;
    virtual std::string name() const = 0;
    virtual bool pure() const { return true; }
};

struct SurrogateParams {
    std::vector<double> stage_coefficients = {1.0, 1.0, 1.0, 1.0, 1.0};
};

// Closed-form capacity surrogate: S = sum over non-Identity layers of
// coeff(stage) * log2(1 + e), loss = 1 / (1 + S). Strictly decreasing in
// any capacity increase, so (loss, macs, params) has a genuine trade-off
// and the Pareto set of small spaces is enumerable.
class SurrogateEvaluator : public Evaluator {
public:
    SurrogateEvaluator(SearchSpaceSpec space, SurrogateParams params = {});
    double evaluate(const Genome& genome) const override;
    std::string name() const override { return "surrogate"; }

private:
    SearchSpaceSpec space_;
    SurrogateParams params_;
};

double surrogate_loss(const SearchSpaceSpec& space, const Genome& genome,
                      const SurrogateParams& params);

// Exercises the full weight-mapping path: score = kept L1 mass over total
// L1 mass at the slots the individual uses, loss = 1 - score * (1 - eps).
class ProxyEvaluator : public Evaluator {
public:
    ProxyEvaluator(SearchSpaceSpec space, std::shared_ptr<const SupernetWeights> supernet);
    double evaluate(const Genome& genome) const override;
    std::string name() const override { return "proxy"; }

private:
    SearchSpaceSpec space_;
    std::shared_ptr<const SupernetWeights> supernet_;
};

double proxy_loss(const SearchSpaceSpec& space, const Genome& genome,
                  const SupernetWeights& supernet);

}  // namespace mnsga

#endif
