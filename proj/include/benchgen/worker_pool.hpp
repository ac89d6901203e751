#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <future>
#include <mutex>
#include <queue>
#include <thread>
#include <type_traits>
#include <vector>

namespace benchgen {

// Fixed-size thread pool. Tasks run in FIFO submission order across
// `size()` workers; results and exceptions come back through futures.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t workers) {
        if (workers == 0) workers = 1;
        threads_.reserve(workers);
        for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { run(); });
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    ~WorkerPool() {
        {
            std::lock_guard lock(mu_);
            stopping_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    std::size_t size() const noexcept { return threads_.size(); }

    template <typename F>
    auto submit(F&& fn) -> std::future<std::invoke_result_t<F>> {
        using R = std::invoke_result_t<F>;
        auto task = std::make_shared<std::packaged_task<R()>>(std::forward<F>(fn));
        auto fut = task->get_future();
        {
            std::lock_guard lock(mu_);
            queue_.emplace([task] { (*task)(); });
        }
        cv_.notify_one();
        return fut;
    }

private:
    void run() {
        for (;;) {
            std::function<void()> job;
            {
                std::unique_lock lock(mu_);
                cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
                if (stopping_ && queue_.empty()) return;
                job = std::move(queue_.front());
                queue_.pop();
            }
            job();
        }
    }

    std::mutex mu_;
    std::condition_variable cv_;
    std::queue<std::function<void()>> queue_;
    std::vector<std::thread> threads_;
    bool stopping_ = false;
};

// Runs fn(i) for i in [0, n) on `pool` (inline when pool is null or has a
// single worker) and returns results in index order. The first exception
// in index order is rethrown after every task has finished.
template <typename F>
auto parallel_map(WorkerPool* pool, std::size_t n, F&& fn) -> std::vector<std::invoke_result_t<F, std::size_t>> {
    using R = std::invoke_result_t<F, std::size_t>;
    std::vector<R> out;
    out.reserve(n);
    if (pool == nullptr || pool->size() <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
        return out;
    }
    std::vector<std::future<R>> futures;
    futures.reserve(n);
    for (std::size_t i = 0; i < n; ++i) futures.push_back(pool->submit([&fn, i] { return fn(i); }));
    std::exception_ptr first;
    for (auto& f : futures) {
        try {
            out.push_back(f.get());
        } catch (...) {
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
    return out;
}

}  // namespace benchgen
