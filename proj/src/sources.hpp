#pragma once

#include <memory>
#include <string>

#include "flower/catalog.hpp"

namespace flower::detail {

std::unique_ptr<Session> open_directory_source(const std::string& path, Dialect dialect);
std::unique_ptr<Session> open_sqlite_source(const std::string& path);
bool looks_like_sqlite(const std::string& path);

}  // namespace flower::detail
