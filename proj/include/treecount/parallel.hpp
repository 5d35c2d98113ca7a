#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace treecount {

// Persistent pool of workers executing contiguous range slices. Worker w of
// W always receives slice [w*total/W, (w+1)*total/W), so every output index
// is owned by exactly one worker regardless of W; combined with fixed
// per-index arithmetic order in the callers this makes engine results
// bit-identical across worker counts. for_range() blocks until every slice
// is done, which is the barrier the engines rely on between DP phases.
class WorkerPool {
public:
    using RangeFn = std::function<void(std::size_t begin, std::size_t end, int worker)>;

    explicit WorkerPool(int workers)
        : workers_(workers) {
        if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
        if (workers_ == 1) return;  // single-worker pool runs inline
        threads_.reserve(static_cast<std::size_t>(workers_));
        for (int w = 0; w < workers_; ++w)
            threads_.emplace_back([this, w] { worker_loop(w); });
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    ~WorkerPool() {
        if (threads_.empty()) return;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            stop_ = true;
        }
        cv_workers_.notify_all();
        for (auto& t : threads_) t.join();
    }

    int workers() const { return workers_; }

    static std::size_t slice_begin(std::size_t total, int workers, int w) {
        return total * static_cast<std::size_t>(w) / static_cast<std::size_t>(workers);
    }

    void for_range(std::size_t total, const RangeFn& fn) {
        if (total == 0) return;
        if (workers_ == 1) {
            fn(0, total, 0);
            return;
        }
        {
            std::lock_guard<std::mutex> lock(mutex_);
            job_ = &fn;
            total_ = total;
            remaining_ = workers_;
            ++generation_;
        }
        cv_workers_.notify_all();
        std::unique_lock<std::mutex> lock(mutex_);
        cv_main_.wait(lock, [this] { return remaining_ == 0; });
        job_ = nullptr;
    }

private:
    void worker_loop(int w) {
        std::uint64_t seen = 0;
        while (true) {
            const RangeFn* job = nullptr;
            std::size_t total = 0;
            {
                std::unique_lock<std::mutex> lock(mutex_);
                cv_workers_.wait(lock, [&] { return stop_ || generation_ != seen; });
                if (stop_) return;
                seen = generation_;
                job = job_;
                total = total_;
            }
            const std::size_t begin = slice_begin(total, workers_, w);
            const std::size_t end = slice_begin(total, workers_, w + 1);
            if (begin < end) (*job)(begin, end, w);
            {
                std::lock_guard<std::mutex> lock(mutex_);
                if (--remaining_ == 0) cv_main_.notify_one();
            }
        }
    }

    int workers_;
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable cv_workers_, cv_main_;
    const RangeFn* job_ = nullptr;
    std::size_t total_ = 0;
    int remaining_ = 0;
    std::uint64_t generation_ = 0;
    bool stop_ = false;
};

}  // namespace treecount
