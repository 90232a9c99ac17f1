#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace rpsp::par {

// Splits [0, n) into a fixed number of chunks and runs fn(chunk, begin, end)
// across hardware threads. The chunk layout does not depend on the thread
// count, so per-chunk partial results can be reduced in chunk order to give
// run-to-run identical floating point sums.
inline constexpr std::size_t kChunks = 16;

inline void for_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t nchunks = std::min(kChunks, n);
    const std::size_t per = (n + nchunks - 1) / nchunks;
    unsigned nthreads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                        static_cast<unsigned>(nchunks)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t c = next.fetch_add(1);
            if (c >= nchunks) break;
            std::size_t begin = c * per;
            std::size_t end = std::min(n, begin + per);
            if (begin < end) fn(c, begin, end);
        }
    };
    if (nthreads <= 1) {
        worker();
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
}

}  // namespace rpsp::par
