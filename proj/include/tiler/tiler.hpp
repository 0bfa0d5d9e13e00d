#ifndef TILER_TILER_HPP
#define TILER_TILER_HPP

#include "balance.hpp"
#include "bitset.hpp"
#include "decompose.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "hamilton.hpp"
#include "harness.hpp"
#include "ktt.hpp"
#include "matching.hpp"
#include "packing.hpp"
#include "params.hpp"
#include "rational.hpp"
#include "subdivide.hpp"

#endif
