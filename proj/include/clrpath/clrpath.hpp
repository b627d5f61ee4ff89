#pragma once

#include "approx.hpp"
#include "corpus.hpp"
#include "io.hpp"
#include "oracle.hpp"
