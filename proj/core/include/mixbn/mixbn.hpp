/*
Copyright 2026 The mixbn Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include "mixbn/dataset.hpp"
#include "mixbn/error.hpp"
#include "mixbn/evalsel.hpp"
#include "mixbn/gating.hpp"
#include "mixbn/gbn.hpp"
#include "mixbn/graphs.hpp"
#include "mixbn/mixture.hpp"
#include "mixbn/polya_gamma.hpp"
#include "mixbn/random.hpp"
#include "mixbn/structure.hpp"
#include "mixbn/synthgen.hpp"
#include "mixbn/trace_io.hpp"
