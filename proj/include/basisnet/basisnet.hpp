#pragma once

#include "basisnet/net.hpp"
#include "basisnet/basis.hpp"
#include "basisnet/brg.hpp"
#include "basisnet/verify.hpp"
#include "basisnet/oracle.hpp"
#include "basisnet/io.hpp"
