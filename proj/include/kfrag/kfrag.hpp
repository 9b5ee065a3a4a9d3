// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "kfrag/bench.hpp"
#include "kfrag/codec.hpp"
#include "kfrag/container.hpp"
#include "kfrag/error.hpp"
#include "kfrag/eval.hpp"
#include "kfrag/gf.hpp"
#include "kfrag/params.hpp"
#include "kfrag/random.hpp"
#include "kfrag/redundancy.hpp"
