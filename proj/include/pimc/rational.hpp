// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <cctype>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pimc
{

using rational = mpq_class;

inline rational make_rational( long num, long den = 1 )
{
    rational r( num, den );
    r.canonicalize();
    return r;
}

// Accepts `12`, `0.375`, `3/8` and an optional leading '-'. Returns nullopt on
// anything else; the result is always canonical.
inline std::optional< rational > parse_rational( std::string_view text )
{
    if ( text.empty() )
        return std::nullopt;

    bool negative = false;
    if ( text.front() == '-' ) {
        negative = true;
        text.remove_prefix( 1 );
    }
    if ( text.empty() )
        return std::nullopt;

    auto all_digits = []( std::string_view s ) {
        if ( s.empty() )
            return false;
        for ( char c : s )
            if ( !std::isdigit( static_cast< unsigned char >( c ) ) )
                return false;
        return true;
    };

    rational result;
    if ( auto slash = text.find( '/' ); slash != std::string_view::npos ) {
        auto num = text.substr( 0, slash );
        auto den = text.substr( slash + 1 );
        if ( !all_digits( num ) || !all_digits( den ) )
            return std::nullopt;
        mpz_class d( std::string( den ), 10 );
        if ( d == 0 )
            return std::nullopt;
        result = rational( mpz_class( std::string( num ), 10 ), d );
    } else if ( auto dot = text.find( '.' ); dot != std::string_view::npos ) {
        auto whole = text.substr( 0, dot );
        auto frac = text.substr( dot + 1 );
        if ( whole.empty() && frac.empty() )
            return std::nullopt;
        if ( ( !whole.empty() && !all_digits( whole ) ) || ( !frac.empty() && !all_digits( frac ) ) )
            return std::nullopt;
        mpz_class scale = 1;
        for ( std::size_t i = 0; i < frac.size(); ++i )
            scale *= 10;
        mpz_class digits( std::string( whole.empty() ? "0" : whole ) + std::string( frac ), 10 );
        result = rational( digits, scale );
    } else {
        if ( !all_digits( text ) )
            return std::nullopt;
        result = rational( mpz_class( std::string( text ), 10 ) );
    }
    result.canonicalize();
    if ( negative )
        result = -result;
    return result;
}

// Exact text: `3/10`, `1`, `-1/3`.
inline std::string to_string( const rational& r )
{
    return r.get_str();
}

// Display only; never fed back into computation.
inline std::string to_decimal( const rational& r, int digits = 10 )
{
    std::ostringstream os;
    os << std::setprecision( digits ) << r.get_d();
    return os.str();
}

} // namespace pimc
