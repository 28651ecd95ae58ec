#pragma once

#include "postlie/trees/tree.hpp"
#include "postlie/trees/linear.hpp"
#include "postlie/trees/products.hpp"
#include "postlie/trees/verify.hpp"
