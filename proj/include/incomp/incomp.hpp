#pragma once

#include "incomp/bitstring.hpp"
#include "incomp/codes.hpp"
#include "incomp/commsim.hpp"
#include "incomp/descsys.hpp"
#include "incomp/gf2.hpp"
#include "incomp/harness.hpp"
#include "incomp/majority.hpp"
#include "incomp/matmul.hpp"
#include "incomp/random.hpp"
#include "incomp/stats.hpp"
