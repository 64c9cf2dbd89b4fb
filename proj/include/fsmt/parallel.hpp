#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fsmt {

/// Fixed pool that runs index ranges in static contiguous chunks. Chunking
/// depends only on (n, thread count), and callers write results to per-index
/// slots, so outputs never depend on scheduling.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t threads = 1) : threads_(threads == 0 ? 1 : threads) {
        for (std::size_t t = 1; t < threads_; ++t) workers_.emplace_back([this, t] { loop(t); });
    }
    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;
    ~WorkerPool() {
        {
            std::lock_guard lk(mu_);
            stop_ = true;
            ++generation_;
        }
        cv_.notify_all();
        for (auto& w : workers_) w.join();
    }

    std::size_t threads() const { return threads_; }

    /// Calls fn(i) for every i in [0, n).
    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
        if (threads_ == 1 || n < 2 * threads_) {
            for (std::size_t i = 0; i < n; ++i) fn(i);
            return;
        }
        {
            std::lock_guard lk(mu_);
            job_ = &fn;
            n_ = n;
            pending_ = threads_ - 1;
            error_ = nullptr;
            ++generation_;
        }
        cv_.notify_all();
        std::exception_ptr own;
        try {
            run_chunk(0);
        } catch (...) {
            own = std::current_exception();
        }
        std::unique_lock lk(mu_);
        done_cv_.wait(lk, [this] { return pending_ == 0; });
        job_ = nullptr;
        if (own) std::rethrow_exception(own);
        if (error_) std::rethrow_exception(error_);
    }

private:
    void run_chunk(std::size_t t) {
        const std::size_t lo = n_ * t / threads_;
        const std::size_t hi = n_ * (t + 1) / threads_;
        for (std::size_t i = lo; i < hi; ++i) (*job_)(i);
    }

    void loop(std::size_t t) {
        std::size_t seen = 0;
        for (;;) {
            {
                std::unique_lock lk(mu_);
                cv_.wait(lk, [&] { return generation_ != seen; });
                seen = generation_;
                if (stop_) return;
            }
            std::exception_ptr err;
            try {
                run_chunk(t);
            } catch (...) {
                err = std::current_exception();
            }
            {
                std::lock_guard lk(mu_);
                if (err && !error_) error_ = err;
                if (--pending_ == 0) done_cv_.notify_one();
            }
        }
    }

    std::size_t threads_;
    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::condition_variable done_cv_;
    const std::function<void(std::size_t)>* job_ = nullptr;
    std::size_t n_ = 0;
    std::size_t pending_ = 0;
    std::size_t generation_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

/// FSMT_THREADS when set to a positive integer, otherwise 1.
inline std::size_t default_threads() {
    if (const char* s = std::getenv("FSMT_THREADS")) {
        try {
            const long v = std::stol(s);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (...) {
        }
    }
    return 1;
}

}  // namespace fsmt
