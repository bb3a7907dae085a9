// SPDX-License-Identifier: Apache-2.0
#pragma once

// Exact-rational feasibility of { x >= 0 : a_i . x (<=|=|>=) b_i } by the
// phase-1 simplex method with Bland's rule.

#include "rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace pimc
{

enum class relation { le, eq, ge };

struct linear_row
{
    std::map< std::size_t, rational > coeffs;
    relation rel = relation::eq;
    rational rhs;
};

class feasibility_problem
{
    std::size_t _vars = 0;
    std::vector< linear_row > _rows;

public:
    explicit feasibility_problem( std::size_t variables ) : _vars{ variables } {}

    [[nodiscard]] std::size_t variables() const { return _vars; }
    [[nodiscard]] const std::vector< linear_row >& rows() const { return _rows; }

    void add( std::map< std::size_t, rational > coeffs, relation rel, rational rhs )
    {
        _rows.push_back( { std::move( coeffs ), rel, std::move( rhs ) } );
    }

    // A non-negative solution, or nullopt when none exists.
    [[nodiscard]] std::optional< std::vector< rational > > solve() const
    {
        const std::size_t m = _rows.size();
        if ( m == 0 )
            return std::vector< rational >( _vars );

        std::size_t slacks = 0;
        for ( const auto& r : _rows )
            if ( r.rel != relation::eq )
                ++slacks;
        // Columns: structural | slack | artificial | rhs.
        const std::size_t art0 = _vars + slacks;
        const std::size_t cols = art0 + m;
        std::vector< std::vector< rational > > t( m, std::vector< rational >( cols + 1 ) );
        std::vector< std::size_t > basis( m );

        std::size_t slack = _vars;
        for ( std::size_t i = 0; i < m; ++i ) {
            const auto& r = _rows[ i ];
            for ( const auto& [ j, c ] : r.coeffs )
                t[ i ][ j ] += c;
            if ( r.rel == relation::le )
                t[ i ][ slack++ ] = 1;
            else if ( r.rel == relation::ge )
                t[ i ][ slack++ ] = -1;
            t[ i ][ cols ] = r.rhs;
            if ( r.rhs < 0 )
                for ( auto& v : t[ i ] )
                    v = -v;
            t[ i ][ art0 + i ] = 1;
            basis[ i ] = art0 + i;
        }

        // Reduced costs of the phase-1 objective (sum of artificials).
        std::vector< rational > cost( cols + 1 );
        for ( std::size_t i = 0; i < m; ++i )
            for ( std::size_t j = 0; j <= cols; ++j )
                if ( j < art0 || j == cols )
                    cost[ j ] -= t[ i ][ j ];

        while ( true ) {
            std::size_t enter = cols;
            for ( std::size_t j = 0; j < cols; ++j )
                if ( cost[ j ] < 0 ) {
                    enter = j;
                    break;
                }
            if ( enter == cols )
                break;
            std::size_t leave = m;
            rational best;
            for ( std::size_t i = 0; i < m; ++i ) {
                if ( t[ i ][ enter ] <= 0 )
                    continue;
                rational ratio = t[ i ][ cols ] / t[ i ][ enter ];
                if ( leave == m || ratio < best || ( ratio == best && basis[ i ] < basis[ leave ] ) ) {
                    leave = i;
                    best = ratio;
                }
            }
            if ( leave == m )
                break; // unbounded direction cannot occur in phase 1
            pivot( t, cost, leave, enter );
            basis[ leave ] = enter;
        }

        if ( cost[ cols ] != 0 )
            return std::nullopt;

        std::vector< rational > x( _vars );
        for ( std::size_t i = 0; i < m; ++i )
            if ( basis[ i ] < _vars )
                x[ basis[ i ] ] = t[ i ][ cols ];
        return x;
    }

private:
    static void pivot( std::vector< std::vector< rational > >& t, std::vector< rational >& cost, std::size_t row,
                       std::size_t col )
    {
        const rational inv = 1 / t[ row ][ col ];
        for ( auto& v : t[ row ] )
            v *= inv;
        auto eliminate = [ & ]( std::vector< rational >& target ) {
            if ( target[ col ] == 0 )
                return;
            const rational f = target[ col ];
            for ( std::size_t j = 0; j < target.size(); ++j )
                if ( t[ row ][ j ] != 0 )
                    target[ j ] -= f * t[ row ][ j ];
        };
        for ( std::size_t i = 0; i < t.size(); ++i )
            if ( i != row )
                eliminate( t[ i ] );
        eliminate( cost );
    }
};

} // namespace pimc
