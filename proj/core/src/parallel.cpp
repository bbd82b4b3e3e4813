#include "mlmagma/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mlm {

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::uint64_t count, unsigned threads, std::uint64_t chunk,
                  const std::function<void(std::uint64_t, std::uint64_t, unsigned)>& body) {
    threads = resolve_threads(threads);
    chunk = std::max<std::uint64_t>(chunk, 1);
    if (threads == 1 || count <= chunk) {
        for (std::uint64_t b = 0; b < count; b += chunk) body(b, std::min(count, b + chunk), 0);
        return;
    }

    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;

    auto worker = [&](unsigned id) {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::uint64_t b = next.fetch_add(chunk);
            if (b >= count) break;
            try {
                body(b, std::min(count, b + chunk), id);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace mlm
