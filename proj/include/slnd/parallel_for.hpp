#pragma once

#include "slnd/execmode.hpp"

#include <cstdint>

namespace slnd {

/// Runs body(i) for i in [0, count): plain loop in serial mode, OpenMP
/// static schedule otherwise. Bodies must only write to per-index slots.
template <class F>
void for_each_index(int64_t count, ExecMode mode, F&& body) {
    if (mode == ExecMode::serial) {
        for (int64_t i = 0; i < count; ++i) body(i);
    } else {
#pragma omp parallel for schedule(static)
        for (int64_t i = 0; i < count; ++i) body(i);
    }
}

}  // namespace slnd
