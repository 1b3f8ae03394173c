// Deterministic block-partitioned parallel loop.
//
// Work is split into contiguous index blocks, one per worker. Each index is
// processed by exactly one thread and the per-index computation carries its
// own fixed summation order, so results are bit-identical for any thread
// count.
#ifndef COAGBREAK_PARALLEL_HPP
#define COAGBREAK_PARALLEL_HPP

#include <exception>
#include <thread>
#include <vector>

#include "coagbreak/types.hpp"

namespace coagbreak {

template <class Fn>
void parallel_for(Index begin, Index end, int threads, Fn&& body) {
    const Index count = end - begin;
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        for (Index i = begin; i < end; ++i) body(i);
        return;
    }
    const Index nworkers = std::min<Index>(threads, count);
    const Index chunk = (count + nworkers - 1) / nworkers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nworkers));
    pool.reserve(static_cast<std::size_t>(nworkers));
    for (Index w = 0; w < nworkers; ++w) {
        const Index lo = begin + w * chunk;
        const Index hi = std::min(end, lo + chunk);
        pool.emplace_back([&, lo, hi, w] {
            try {
                for (Index i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace coagbreak

#endif
