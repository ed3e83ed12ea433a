// Copyright 2026 The keb-lab Authors
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

#pragma once

#include "keb/certificate.hpp"
#include "keb/channels.hpp"
#include "keb/core.hpp"
#include "keb/entanglement_breaking.hpp"
#include "keb/io.hpp"
#include "keb/lp.hpp"
#include "keb/majorization.hpp"
#include "keb/positivity.hpp"
#include "keb/random.hpp"
#include "keb/schmidt.hpp"
#include "keb/separability.hpp"
#include "keb/twirl.hpp"
