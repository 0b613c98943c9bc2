#include "ionspec/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace ionspec {

namespace {
std::mutex g_warn_mutex;
std::vector<Warning> g_warnings;
}  // namespace

void warn(const std::string& module, const std::string& message) {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    g_warnings.push_back({module, message});
}

std::vector<Warning> drain_warnings() {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    std::vector<Warning> out;
    out.swap(g_warnings);
    return out;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace ionspec
