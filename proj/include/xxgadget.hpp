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

#include "xxgadget/chebyshev.hpp"
#include "xxgadget/diagnostics.hpp"
#include "xxgadget/dynamics.hpp"
#include "xxgadget/effective.hpp"
#include "xxgadget/eigensolver.hpp"
#include "xxgadget/gadgets.hpp"
#include "xxgadget/krylov.hpp"
#include "xxgadget/parallel.hpp"
#include "xxgadget/pauli.hpp"
#include "xxgadget/sparse.hpp"
#include "xxgadget/spectral.hpp"
#include "xxgadget/toy_problem.hpp"
