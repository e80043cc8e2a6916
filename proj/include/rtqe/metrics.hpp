// Copyright 2026 The rtqe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RTQE_METRICS_HPP
#define RTQE_METRICS_HPP

#include "rtqe/metrics/bleu.hpp"
#include "rtqe/metrics/chrf.hpp"
#include "rtqe/metrics/score.hpp"
#include "rtqe/metrics/ter.hpp"
#include "rtqe/metrics/tf_cosine.hpp"

#endif  // RTQE_METRICS_HPP
