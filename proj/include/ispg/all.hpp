// SPDX-License-Identifier: Apache-2.0
//
// ispg - intra-pair skew modelling for cascaded coupled transmission lines
// Copyright (C) 2026 The ispg authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "types.hpp"
#include "mode_solver.hpp"
#include "sparam.hpp"
#include "skew.hpp"
#include "ispg.hpp"
#include "cascade.hpp"
#include "fit.hpp"
#include "touchstone.hpp"
#include "table.hpp"
#include "config.hpp"
