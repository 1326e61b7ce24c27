#include "ymwh/errors.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace ymwh {

namespace {

std::mutex& handler_mutex()
{
    static std::mutex m;
    return m;
}

WarningHandler& handler_slot()
{
    static WarningHandler h = [](const std::string& msg) { std::cerr << "ymwh: warning: " << msg << '\n'; };
    return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler)
{
    std::lock_guard lock(handler_mutex());
    return std::exchange(handler_slot(), std::move(handler));
}

void warn(const std::string& message)
{
    WarningHandler h;
    {
        std::lock_guard lock(handler_mutex());
        h = handler_slot();
    }
    if (h) h(message);
}

}  // namespace ymwh
