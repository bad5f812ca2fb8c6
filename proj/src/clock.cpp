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

#include "slsbench/clock.hpp"

#include <chrono>
#include <thread>

namespace slsbench {

std::int64_t SteadyClock::now_ns() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void SteadyClock::sleep_for_ns(std::int64_t ns) {
    if (ns <= 0) return;
    // sleep_for may wake early on some kernels; loop until the deadline passes.
    const auto deadline = now_ns() + ns;
    for (auto left = ns; left > 0; left = deadline - now_ns()) {
        std::this_thread::sleep_for(std::chrono::nanoseconds(left));
    }
}

std::int64_t VirtualClock::now_ns() const {
    std::lock_guard lock(mu_);
    return now_;
}

void VirtualClock::sleep_for_ns(std::int64_t ns) {
    if (ns <= 0) return;
    std::lock_guard lock(mu_);
    now_ += ns;
}

void VirtualClock::jump_to(std::int64_t ns) {
    std::lock_guard lock(mu_);
    now_ = ns;
}

}  // namespace slsbench
