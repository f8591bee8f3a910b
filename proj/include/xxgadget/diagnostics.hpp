// Copyright 2026 The xxgadget Authors
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

#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <utility>

namespace xxgadget {

using WarningHandler = std::function<void(const std::string&)>;

namespace detail {

struct WarningState {
  std::mutex mutex;
  WarningHandler handler = [](const std::string& msg) {
    std::cerr << "xxgadget warning: " << msg << "\n";
  };
};

inline WarningState& warning_state() {
  static WarningState state;
  return state;
}

}  // namespace detail

/** Installs a warning sink and returns the previous one. */
inline WarningHandler set_warning_handler(WarningHandler handler) {
  auto& st = detail::warning_state();
  std::lock_guard lock(st.mutex);
  std::swap(st.handler, handler);
  return handler;
}

inline void warn(const std::string& message) {
  auto& st = detail::warning_state();
  std::lock_guard lock(st.mutex);
  if (st.handler) st.handler(message);
}

/** Restores the previous warning handler on scope exit. */
class ScopedWarningHandler {
 public:
  explicit ScopedWarningHandler(WarningHandler handler)
      : previous_(set_warning_handler(std::move(handler))) {}
  ~ScopedWarningHandler() { set_warning_handler(std::move(previous_)); }
  ScopedWarningHandler(const ScopedWarningHandler&) = delete;
  ScopedWarningHandler& operator=(const ScopedWarningHandler&) = delete;

 private:
  WarningHandler previous_;
};

}  // namespace xxgadget
