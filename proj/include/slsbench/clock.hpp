// Copyright 2026 The SlsBench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <mutex>

namespace slsbench {

// Monotonic nanosecond time source used for every duration the harness
// measures. Wall-clock time is never used for durations.
class Clock {
public:
    virtual ~Clock() = default;

    virtual std::int64_t now_ns() const = 0;
    virtual void sleep_for_ns(std::int64_t ns) = 0;
    virtual bool is_virtual() const { return false; }
};

class SteadyClock final : public Clock {
public:
    std::int64_t now_ns() const override;
    void sleep_for_ns(std::int64_t ns) override;
};

// Deterministic clock: sleeping advances time instantly. The discrete-event
// throughput driver may also jump the clock to a worker's local timeline, so
// successive reads are only monotonic along one logical timeline.
class VirtualClock final : public Clock {
public:
    explicit VirtualClock(std::int64_t start_ns = 0) : now_(start_ns) {}

    std::int64_t now_ns() const override;
    void sleep_for_ns(std::int64_t ns) override;
    bool is_virtual() const override { return true; }

    void jump_to(std::int64_t ns);

private:
    mutable std::mutex mu_;
    std::int64_t now_;
};

inline constexpr std::int64_t kNsPerMs = 1'000'000;
inline constexpr std::int64_t kNsPerSecond = 1'000'000'000;

inline std::int64_t ms_to_ns(double ms) {
    return static_cast<std::int64_t>(ms * static_cast<double>(kNsPerMs) + (ms >= 0 ? 0.5 : -0.5));
}

inline double ns_to_ms(std::int64_t ns) { return static_cast<double>(ns) / 1e6; }

}  // namespace slsbench
