#pragma once

#include <strongcol/coloring.hpp>
#include <strongcol/errors.hpp>
#include <strongcol/exact.hpp>
#include <strongcol/graph.hpp>
#include <strongcol/io.hpp>
#include <strongcol/lemmas.hpp>
#include <strongcol/matching.hpp>
#include <strongcol/parallel.hpp>
#include <strongcol/partition.hpp>
#include <strongcol/random.hpp>
#include <strongcol/sparse.hpp>
#include <strongcol/transversal.hpp>
