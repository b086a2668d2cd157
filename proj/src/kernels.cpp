// Copyright 2026 The readout-sim Authors
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

#include "readout/kernels.hpp"

#include <cstdlib>

namespace readout::kernels {

namespace {

const Backend* g_active = nullptr;

const Backend* pick_default() {
  const char* force = std::getenv("READOUT_SIM_FORCE_SCALAR");
  if (force != nullptr && force[0] == '1') return &scalar_backend();
  if (const Backend* avx2 = avx2_backend()) return avx2;
  return &scalar_backend();
}

}  // namespace

const Backend& active() {
  if (g_active == nullptr) g_active = pick_default();
  return *g_active;
}

bool select_backend(const std::string& name) {
  if (name == "scalar") {
    g_active = &scalar_backend();
    return true;
  }
  if (name == "avx2") {
    const Backend* b = avx2_backend();
    if (b == nullptr) return false;
    g_active = b;
    return true;
  }
  return false;
}

}  // namespace readout::kernels
