/**
 * Copyright 2026 The aciq-toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "aciq/analytic.hpp"
#include "aciq/bias_correction.hpp"
#include "aciq/bisect.hpp"
#include "aciq/bit_allocation.hpp"
#include "aciq/csv.hpp"
#include "aciq/distributions.hpp"
#include "aciq/erf.hpp"
#include "aciq/error.hpp"
#include "aciq/kld.hpp"
#include "aciq/pipeline.hpp"
#include "aciq/quantizer.hpp"
#include "aciq/random.hpp"
#include "aciq/report.hpp"
#include "aciq/simulation.hpp"
#include "aciq/tensor_io.hpp"
