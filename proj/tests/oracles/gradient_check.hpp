#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fishmig/lstm.hpp"
#include "lstm_reference.hpp"

namespace oracle {

struct GradCheck {
    double max_rel = 0.0;
    std::string worst;
};

// Compares every analytic gradient entry with a central difference of the
// independent scalar reference loss.
inline GradCheck check_gradients(const fishmig::lstm::Model& model,
                                 const std::vector<fishmig::tdf::TrainingPair>& batch, double h = 1e-5) {
    using namespace fishmig::lstm;
    const auto g = bptt_gradients(model, batch);
    Model probe = model;
    auto blocks = param_blocks(probe);
    Model gcopy = g.grad;
    const auto gblocks = param_blocks(gcopy);
    GradCheck out;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (std::size_t k = 0; k < blocks[b].size; ++k) {
            double& w = blocks[b].data[k];
            const double saved = w;
            w = saved + h;
            const double up = ref_batch_loss(probe, batch);
            w = saved - h;
            const double down = ref_batch_loss(probe, batch);
            w = saved;
            const double fd = (up - down) / (2 * h);
            const double an = gblocks[b].data[k];
            const double scale = std::max({std::abs(fd), std::abs(an), 1e-6});
            const double rel = std::abs(fd - an) / scale;
            if (rel > out.max_rel) {
                out.max_rel = rel;
                out.worst = blocks[b].name + "[" + std::to_string(k) + "]";
            }
        }
    }
    return out;
}

}  // namespace oracle
