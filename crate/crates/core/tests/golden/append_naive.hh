hastype z nat.
forall n:tm. hastype n nat => hastype (s n) nat.
hastype nil list.
forall n:tm. hastype n nat => forall l:tm. hastype l list => hastype (cons n l) list.
forall l:tm. hastype l list => hastype (appNil l) (append nil l l).
forall x:tm. hastype x nat => forall l:tm. hastype l list => forall k:tm. hastype k list =>
  forall m:tm. hastype m list => forall a:tm. hastype a (append l k m) =>
  hastype (appCons x l k m a) (append (cons x l) k (cons x m)).
